#pragma once

// JSON forms of matrices, decompositions, circuits, copiers, protocol
// configs and run reports.  Complex matrices are row-major arrays of
// [re, im] pairs.  Structural problems raise ValidationError; malformed
// JSON text raises nlohmann::json::parse_error.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qcopier/bloch.hpp"
#include "qcopier/canonical.hpp"
#include "qcopier/circuits.hpp"
#include "qcopier/protocols.hpp"
#include "qcopier/stochastic.hpp"

namespace qcopier {

using json = nlohmann::json;

inline constexpr const char* kSchema = "qcopier/1";

/// Multiplies every angle read from a config; stored configs are radians.
struct AngleUnit {
  double scale = 1.0;
  static AngleUnit radians() { return {1.0}; }
  static AngleUnit degrees() { return {kPi / 180.0}; }
};

json to_json(const COp& m);
COp op_from_json(const json& j);
/// 4x2 matrix.
json to_json(const Isometry& v);
json to_json(const CVec& v);
CVec vec_from_json(const json& j);
json to_json(const Eigen::Matrix3d& m);
json to_json(const Eigen::Vector3d& v);

json to_json(const CanonicalDecomposition& d);
CanonicalDecomposition decomposition_from_json(const json& j);

json to_json(const AffineChannel& ch);
json to_json(const EllipsoidReport& r);

std::string_view to_string(TangencyKind k);
Mode mode_from_string(const std::string& s);
Qubit qubit_from_string(const std::string& s);

/// {b_init, gates: [{type, target|control, phi?, u?, frame}]}.
json to_json(const Circuit& c);
Circuit circuit_from_json(const json& j, AngleUnit unit = {});

/// {branches: [{p, circuit | isometry}]}.
struct CopierSpec {
  std::vector<double> p;
  std::vector<std::variant<Circuit, Isometry>> branches;

  StochasticCopier copier() const;
  /// Present when every branch is a circuit and all share one b_init.
  std::optional<UnitaryBranches> unitary_branches() const;
};
json to_json(const CopierSpec& c);
CopierSpec copier_from_json(const json& j, AngleUnit unit = {});

struct Bb84Spec {
  Bb84Config cfg;
  std::optional<CopierSpec> copier;  // absent: V_c(gamma, delta)
};
json to_json(const Bb84Spec& s);
/// Seed is mandatory.
Bb84Spec bb84_from_json(const json& j, AngleUnit unit = {});

json to_json(const B92Config& c);
/// Seed is mandatory; gamma_prime may be "auto".
B92Config b92_from_json(const json& j, AngleUnit unit = {});

json to_json(const ErrorRates& r);
json to_json(const ModeCounters& c);
json to_json(const B92Stats& s);

struct CheckOutcome {
  bool enabled = false;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

struct RunReport {
  std::string command;
  json config = json::object();
  json results = json::object();
  std::optional<std::uint64_t> seed;
  double wall_time_s = 0.0;
  CheckOutcome check;
};
json to_json(const RunReport& r);
RunReport run_report_from_json(const json& j);

/// A report's config if j is a run report, otherwise j itself.
const json& unwrap_config(const json& j);

}  // namespace qcopier
