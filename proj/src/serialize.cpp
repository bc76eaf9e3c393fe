#include "qcopier/serialize.hpp"

#include <cmath>

namespace qcopier {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string("'") + what + "' must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(std::string("'") + what + "' must be finite");
  return x;
}

double number_field(const json& j, const char* key) { return number(field(j, key), key); }

std::uint64_t u64_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(std::string("'") + key + "' must be a non-negative integer");
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

cplx complex_from_json(const json& e) {
  if (e.is_number()) return {number(e, "matrix entry"), 0.0};
  if (e.is_array() && e.size() == 2) return {number(e[0], "matrix entry"), number(e[1], "matrix entry")};
  fail("complex entries must be [re, im] pairs or numbers");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) fail("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) fail("matrix rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail("matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json frame_to_json(const Basis& f) {
  switch (f.kind()) {
    case FrameKind::standard:
      return "standard";
    case FrameKind::x:
      return "x";
    case FrameKind::y:
      return "y";
    case FrameKind::custom:
      break;
  }
  return to_json(f.matrix());
}

Basis frame_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "standard" || s == "z") return Basis::standard();
    if (s == "x") return Basis::x();
    if (s == "y") return Basis::y();
    fail("unknown frame '" + s + "'");
  }
  return Basis::custom(op_from_json(j));
}

std::string_view qubit_name(Qubit q) { return q == Qubit::a ? "a" : "b"; }

std::string_view machine_name(B92Machine m) { return m == B92Machine::fig7 ? "measured" : "unitary"; }

Isometry isometry_from_json(const json& j) {
  const Eigen::MatrixXcd m = matrix_from_json(j);
  if (m.rows() != 4 || m.cols() != 2) fail("isometry must be a 4x2 matrix");
  const Isometry v = Isometry::from_matrix(m);
  if (v.orthonormality_error() > 1e-10) fail("isometry columns are not orthonormal");
  return v;
}

}  // namespace

json to_json(const COp& m) { return matrix_to_json(m.mat()); }

json to_json(const Isometry& v) { return matrix_to_json(v.matrix()); }

COp op_from_json(const json& j) {
  const Eigen::MatrixXcd m = matrix_from_json(j);
  if (m.rows() != m.cols()) fail("operator must be square");
  if (!is_supported_dim(m.rows())) throw DimensionError("operator dimension must be 2, 4 or 8");
  return COp(m);
}

json to_json(const CVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.dim(); ++i) a.push_back(complex_to_json(v[i]));
  return a;
}

CVec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) fail("vector must be a non-empty array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return CVec(v);
}

json to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

json to_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

json to_json(const CanonicalDecomposition& d) {
  return {{"zeta", d.params.zeta}, {"eta", d.params.eta}, {"s_o", to_json(d.s_o)},
          {"s_a", to_json(d.s_a)}, {"s_b", to_json(d.s_b)}};
}

CanonicalDecomposition decomposition_from_json(const json& j) {
  CanonicalDecomposition d{{number_field(j, "zeta"), number_field(j, "eta")},
                           op_from_json(field(j, "s_o")), op_from_json(field(j, "s_a")),
                           op_from_json(field(j, "s_b"))};
  for (const COp* s : {&d.s_o, &d.s_a, &d.s_b}) {
    if (s->dim() != 2 || !s->is_unitary()) fail("decomposition factors must be 2x2 unitaries");
  }
  return d;
}

json to_json(const AffineChannel& ch) { return {{"m", to_json(ch.m)}, {"d", to_json(ch.d)}}; }

std::string_view to_string(TangencyKind k) {
  switch (k) {
    case TangencyKind::none:
      return "none";
    case TangencyKind::points:
      return "points";
    case TangencyKind::continuum:
      return "continuum";
  }
  return "none";
}

json to_json(const EllipsoidReport& r) {
  json dirs = json::array();
  for (int c = 0; c < 3; ++c) dirs.push_back(to_json(Eigen::Vector3d(r.axis_directions.col(c))));
  json points = json::array(), inputs = json::array();
  for (const auto& p : r.tangency_points) points.push_back(to_json(p));
  for (const auto& u : r.tangency_inputs) inputs.push_back(to_json(u));
  return {{"semi_axes", to_json(r.semi_axes)},
          {"axis_directions", dirs},
          {"center", to_json(r.center)},
          {"signed_m", to_json(r.signed_m)},
          {"max_norm", r.max_norm},
          {"tangency", to_string(r.tangency)},
          {"tangency_points", points},
          {"tangency_inputs", inputs}};
}

Mode mode_from_string(const std::string& s) {
  if (s == "x") return Mode::x;
  if (s == "y") return Mode::y;
  if (s == "z") return Mode::z;
  fail("unknown mode '" + s + "'");
}

Qubit qubit_from_string(const std::string& s) {
  if (s == "a") return Qubit::a;
  if (s == "b") return Qubit::b;
  fail("unknown qubit '" + s + "' (expected a or b)");
}

json to_json(const Circuit& c) {
  json gates = json::array();
  for (const Gate& g : c.gates) {
    json jg = std::visit(
        [](const auto& op) -> json {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, Cnot>) {
            return {{"type", "cnot"}, {"control", qubit_name(op.control)}};
          } else if constexpr (std::is_same_v<T, Rot>) {
            return {{"type", "rot"}, {"target", qubit_name(op.target)}, {"phi", op.phi}};
          } else if constexpr (std::is_same_v<T, Hadamard>) {
            return {{"type", "h"}, {"target", qubit_name(op.target)}};
          } else if constexpr (std::is_same_v<T, CRot>) {
            return {{"type", "crot"}, {"control", qubit_name(op.control)}, {"phi", op.phi}};
          } else {
            return {{"type", "unitary"}, {"target", qubit_name(op.target)}, {"u", to_json(op.u)}};
          }
        },
        g.op);
    jg["frame"] = frame_to_json(g.frame);
    gates.push_back(std::move(jg));
  }
  return {{"b_init", to_json(c.b_init)}, {"gates", gates}};
}

Circuit circuit_from_json(const json& j, AngleUnit unit) {
  Circuit c;
  if (j.contains("b_init")) {
    c.b_init = vec_from_json(j["b_init"]);
    if (c.b_init.dim() != 2 || !c.b_init.is_normalized(1e-10)) fail("b_init must be a normalized qubit state");
  }
  const json& gates = field(j, "gates");
  if (!gates.is_array()) fail("'gates' must be an array");
  for (const json& g : gates) {
    const std::string type = string_field(g, "type");
    const Basis f = g.contains("frame") ? frame_from_json(g["frame"]) : Basis::standard();
    if (type == "cnot") {
      c.gates.push_back(Gate::cnot(qubit_from_string(string_field(g, "control")), f));
    } else if (type == "rot") {
      c.gates.push_back(Gate::rot(qubit_from_string(string_field(g, "target")), unit.scale * number_field(g, "phi"), f));
    } else if (type == "h") {
      c.gates.push_back(Gate::h(qubit_from_string(string_field(g, "target")), f));
    } else if (type == "crot") {
      c.gates.push_back(Gate::crot(qubit_from_string(string_field(g, "control")), unit.scale * number_field(g, "phi"), f));
    } else if (type == "unitary") {
      const COp u = op_from_json(field(g, "u"));
      if (u.dim() != 2 || !u.is_unitary()) fail("'u' must be a 2x2 unitary");
      c.gates.push_back(Gate::unitary(qubit_from_string(string_field(g, "target")), u, f));
    } else {
      fail("unknown gate type '" + type + "'");
    }
  }
  return c;
}

StochasticCopier CopierSpec::copier() const {
  std::vector<CopierBranch> br;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Isometry v = std::holds_alternative<Circuit>(branches[i])
                           ? circuit_isometry(std::get<Circuit>(branches[i]))
                           : std::get<Isometry>(branches[i]);
    br.push_back({p[i], v});
  }
  return StochasticCopier(std::move(br));
}

std::optional<UnitaryBranches> CopierSpec::unitary_branches() const {
  UnitaryBranches ub;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto* c = std::get_if<Circuit>(&branches[i]);
    if (c == nullptr) return std::nullopt;
    if (i == 0) {
      ub.b_init = c->b_init;
    } else if ((c->b_init.vec() - ub.b_init.vec()).norm() > 1e-12) {
      return std::nullopt;
    }
    ub.p.push_back(p[i]);
    ub.u.push_back(compile(*c));
  }
  return ub;
}

json to_json(const CopierSpec& c) {
  json br = json::array();
  for (std::size_t i = 0; i < c.branches.size(); ++i) {
    json b = {{"p", c.p[i]}};
    if (const auto* circ = std::get_if<Circuit>(&c.branches[i])) {
      b["circuit"] = to_json(*circ);
    } else {
      b["isometry"] = to_json(std::get<Isometry>(c.branches[i]));
    }
    br.push_back(std::move(b));
  }
  return {{"branches", br}};
}

CopierSpec copier_from_json(const json& j, AngleUnit unit) {
  const json& br = field(j, "branches");
  if (!br.is_array() || br.empty()) fail("'branches' must be a non-empty array");
  CopierSpec spec;
  for (const json& b : br) {
    spec.p.push_back(number_field(b, "p"));
    if (b.contains("circuit")) {
      spec.branches.emplace_back(circuit_from_json(b["circuit"], unit));
    } else if (b.contains("isometry")) {
      spec.branches.emplace_back(isometry_from_json(b["isometry"]));
    } else {
      fail("each branch needs a 'circuit' or an 'isometry'");
    }
  }
  spec.copier();  // validates the probabilities
  return spec;
}

json to_json(const Bb84Spec& s) {
  json modes = json::array();
  for (const Mode m : s.cfg.modes) modes.push_back(to_string(m));
  json j = {{"gamma", s.cfg.gamma},       {"delta", s.cfg.delta}, {"n_trials", s.cfg.n_trials},
            {"seed", s.cfg.seed},         {"modes", modes},       {"keep_records", s.cfg.keep_records}};
  if (s.copier) j["copier"] = to_json(*s.copier);
  return j;
}

Bb84Spec bb84_from_json(const json& j, AngleUnit unit) {
  Bb84Spec s;
  if (j.contains("copier")) {
    s.copier = copier_from_json(j["copier"], unit);
    if (j.contains("gamma")) s.cfg.gamma = unit.scale * number_field(j, "gamma");
    if (j.contains("delta")) s.cfg.delta = unit.scale * number_field(j, "delta");
  } else {
    s.cfg.gamma = unit.scale * number_field(j, "gamma");
    s.cfg.delta = unit.scale * number_field(j, "delta");
  }
  s.cfg.n_trials = u64_field(j, "n_trials");
  if (s.cfg.n_trials < 1) fail("'n_trials' must be at least 1");
  s.cfg.seed = u64_field(j, "seed");
  if (j.contains("modes")) {
    const json& m = j["modes"];
    if (!m.is_array() || m.empty()) fail("'modes' must be a non-empty array");
    s.cfg.modes.clear();
    for (const json& x : m) {
      if (!x.is_string()) fail("modes must be strings");
      s.cfg.modes.push_back(mode_from_string(x.get<std::string>()));
    }
  }
  if (j.contains("keep_records")) {
    if (!j["keep_records"].is_boolean()) fail("'keep_records' must be a boolean");
    s.cfg.keep_records = j["keep_records"].get<bool>();
  }
  return s;
}

json to_json(const B92Config& c) {
  return {{"alpha_bar", c.alpha_bar},
          {"delta", c.delta},
          {"gamma_prime", c.gamma_prime ? json(*c.gamma_prime) : json("auto")},
          {"n_trials", c.n_trials},
          {"seed", c.seed},
          {"machine", machine_name(c.machine)}};
}

B92Config b92_from_json(const json& j, AngleUnit unit) {
  B92Config c;
  if (j.contains("alpha_bar")) c.alpha_bar = unit.scale * number_field(j, "alpha_bar");
  if (!(c.alpha_bar > 0.0 && c.alpha_bar < 0.25 * kPi)) fail("'alpha_bar' must lie in (0, pi/4)");
  c.delta = unit.scale * number_field(j, "delta");
  if (j.contains("gamma_prime")) {
    const json& g = j["gamma_prime"];
    if (g.is_string()) {
      if (g.get<std::string>() != "auto") fail("'gamma_prime' must be a number or \"auto\"");
    } else {
      c.gamma_prime = unit.scale * number(g, "gamma_prime");
    }
  }
  c.n_trials = u64_field(j, "n_trials");
  if (c.n_trials < 1) fail("'n_trials' must be at least 1");
  c.seed = u64_field(j, "seed");
  if (j.contains("machine")) {
    const std::string m = string_field(j, "machine");
    if (m == "measured") {
      c.machine = B92Machine::fig7;
    } else if (m == "unitary") {
      c.machine = B92Machine::fig3a;
    } else {
      fail("'machine' must be \"measured\" or \"unitary\"");
    }
  }
  return c;
}

json to_json(const ErrorRates& r) {
  return {{"p_x", r.p_x}, {"q_x", r.q_x}, {"p_y", r.p_y}, {"q_y", r.q_y}};
}

json to_json(const ModeCounters& c) {
  return {{"sent", c.sent},
          {"bob_errors", c.bob_errors},
          {"eve_errors", c.eve_errors},
          {"p", c.p()},
          {"q", c.q()},
          {"p_bit", {c.p_bit(0), c.p_bit(1)}},
          {"q_bit", {c.q_bit(0), c.q_bit(1)}}};
}

json to_json(const B92Stats& s) {
  return {{"gamma_prime", s.gamma_prime},
          {"eve_success", s.eve_success},
          {"bob_disturbance", s.bob_disturbance},
          {"conclusive_rate", s.conclusive_rate},
          {"n_trials", s.n_trials},
          {"n_disturbance_trials", s.n_disturbance_trials},
          {"exact_disturbance", s.exact_disturbance},
          {"exact_eve_success", s.exact_eve_success}};
}

json to_json(const RunReport& r) {
  return {{"schema", kSchema},
          {"command", r.command},
          {"config", r.config},
          {"results", r.results},
          {"seed", r.seed ? json(*r.seed) : json(nullptr)},
          {"wall_time_s", r.wall_time_s},
          {"check", {{"enabled", r.check.enabled}, {"passed", r.check.passed()}, {"failures", r.check.failures}}}};
}

RunReport run_report_from_json(const json& j) {
  if (string_field(j, "schema") != kSchema) fail(std::string("unsupported schema, expected ") + kSchema);
  RunReport r;
  r.command = string_field(j, "command");
  r.config = field(j, "config");
  r.results = field(j, "results");
  const json& seed = field(j, "seed");
  if (!seed.is_null()) r.seed = u64_field(j, "seed");
  r.wall_time_s = number_field(j, "wall_time_s");
  if (j.contains("check")) {
    const json& c = j["check"];
    r.check.enabled = field(c, "enabled").get<bool>();
    r.check.failures = field(c, "failures").get<std::vector<std::string>>();
  }
  return r;
}

const json& unwrap_config(const json& j) {
  if (j.is_object() && j.contains("schema") && j.contains("config")) return j["config"];
  return j;
}

}  // namespace qcopier
