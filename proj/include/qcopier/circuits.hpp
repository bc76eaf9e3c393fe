#pragma once

// Two-qubit gate circuits with basis frames.
//
// A gate stored with frame F compiles to (F (x) F) T (F (x) F)^dagger where T
// is its textbook matrix; the frame columns are |0_f>, |1_f>.  Gates apply
// in list order (left to right in a circuit diagram).

#include <array>
#include <string_view>
#include <variant>
#include <vector>

#include "qcopier/bloch.hpp"
#include "qcopier/canonical.hpp"
#include "qcopier/linalg.hpp"

namespace qcopier {

/// Measurement / signalling modes.  z is the standard basis.
enum class Mode { x, y, z };

std::string_view to_string(Mode m);

enum class FrameKind { standard, x, y, custom };

std::string_view to_string(FrameKind k);

class Basis {
 public:
  Basis() = default;

  static Basis standard();
  /// |0_x> = (|0>+|1>)/sqrt2, |1_x> = (|0>-|1>)/sqrt2
  static Basis x();
  /// |0_y> = (|0>+i|1>)/sqrt2, |1_y> = (|0>-i|1>)/sqrt2
  static Basis y();
  static Basis of(Mode m);
  /// Columns are the frame vectors; must be unitary to 1e-12.
  static Basis custom(const COp& frame);

  FrameKind kind() const { return kind_; }
  const COp& matrix() const { return f_; }
  CVec state(int k) const;

 private:
  Basis(FrameKind k, COp f) : kind_(k), f_(std::move(f)) {}
  FrameKind kind_ = FrameKind::standard;
  COp f_ = COp::identity(2);
};

/// R(phi) = [[cos phi/2, -sin phi/2], [sin phi/2, cos phi/2]].
COp rotation(double phi);
COp hadamard();

struct Cnot {
  Qubit control = Qubit::a;
};
struct Rot {
  Qubit target = Qubit::a;
  double phi = 0.0;
};
struct Hadamard {
  Qubit target = Qubit::a;
};
/// Target is the other qubit: R(+phi) when the control is 0, R(-phi) when 1.
struct CRot {
  Qubit control = Qubit::b;
  double phi = 0.0;
};
/// Arbitrary one-qubit unitary.
struct Unitary1 {
  Qubit target = Qubit::a;
  COp u = COp::identity(2);
};

using GateOp = std::variant<Cnot, Rot, Hadamard, CRot, Unitary1>;

struct Gate {
  GateOp op;
  Basis frame;

  static Gate cnot(Qubit control, const Basis& f = Basis::standard());
  static Gate rot(Qubit target, double phi, const Basis& f = Basis::standard());
  static Gate h(Qubit target, const Basis& f = Basis::standard());
  static Gate crot(Qubit control, double phi, const Basis& f = Basis::standard());
  static Gate unitary(Qubit target, const COp& u, const Basis& f = Basis::standard());
};

struct Circuit {
  std::vector<Gate> gates;
  CVec b_init = CVec::basis(2, 0);
};

COp gate_unitary(const Gate& g);
COp compile(const Circuit& c);
Isometry circuit_isometry(const Circuit& c);
/// Isometries equal up to global phase within 1e-10.
bool equivalent(const Circuit& c1, const Circuit& c2);

/// Primed angles: gamma' = pi/2 - gamma, delta' = pi/2 - delta (an involution).
GammaDelta primed(const GammaDelta& gd);

/// R(gamma) on b, CNOT a->b, R(-delta) on b, CNOT b->a; isometry V_c.
Circuit build_fig2a(const GammaDelta& gd);
/// Same isometry as build_fig2a, different unitary.
Circuit build_fig2c(const GammaDelta& gd);
/// S_o on the input, the build_fig2a gates, then S_a and S_b on the outputs.
Circuit build_fig2b(const CanonicalDecomposition& d);
/// build_fig2a without its final CNOT.
Circuit build_one_cnot(const GammaDelta& gd);

/// b prepared in |0_f>; mode x: R(delta) on b, CNOT a->b, CRot(+-gamma');
/// mode y: R(gamma) on b, CNOT a->b, CRot(+-delta').  All gates in `frame`.
Circuit build_fig3(const GammaDelta& gd_primed, Mode mode, const Basis& frame);
Circuit build_fig3(const GammaDelta& gd_primed, Mode mode);
/// Angle roles of build_fig3 interchanged, followed by a swap of the outputs.
Circuit build_fig6(const GammaDelta& gd_primed, Mode mode, const Basis& frame);
Circuit build_fig6(const GammaDelta& gd_primed, Mode mode);

/// Gates, then a measurement of b, then a one-qubit operation on a chosen
/// by the outcome.
struct MeasuredCircuit {
  Circuit pre;
  Basis measurement;
  std::array<COp, 2> conditional{COp::identity(2), COp::identity(2)};
};

/// build_fig3 (x mode) up to its CNOT, x measurement of b, then R_x(+-gamma') on a.
MeasuredCircuit build_fig7(const GammaDelta& gd_primed);

/// Joint two-qubit output density U (rho_in (x) |b><b|) U^dagger.
COp output_state(const Circuit& c, const COp& rho_in);

struct MeasuredBranch {
  double probability = 0.0;
  COp rho_ab = COp::zero(4);  // normalized post-measurement state (zero if p = 0)
};

std::array<MeasuredBranch, 2> measured_branches(const MeasuredCircuit& mc, const COp& rho_in);

/// Outcome-averaged reduced state of qubit a.
COp bob_output(const MeasuredCircuit& mc, const COp& rho_in);

/// P[k][m]: probability that b measured in `eve` gives k and a measured in
/// `bob` gives m, for a joint state rho_ab.
std::array<std::array<double, 2>, 2> joint_outcomes(const COp& rho_ab, const Basis& bob,
                                                   const Basis& eve);

/// Same table for a measured circuit (b outcome is its measurement record).
std::array<std::array<double, 2>, 2> joint_outcomes(const MeasuredCircuit& mc, const COp& rho_in,
                                                   const Basis& bob);

}  // namespace qcopier
