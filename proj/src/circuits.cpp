#include "qcopier/circuits.hpp"

#include <cmath>

namespace qcopier {

namespace {

constexpr double kEquivalenceTol = 1e-10;

COp dyad(int k) { return COp::projector(CVec::basis(2, k)); }

COp on(Qubit q, const COp& u) {
  return q == Qubit::a ? tensor(u, COp::identity(2)) : tensor(COp::identity(2), u);
}

COp textbook(const GateOp& op) {
  return std::visit(
      [](const auto& g) -> COp {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Cnot>) {
          return g.control == Qubit::a
                     ? tensor(dyad(0), COp::identity(2)) + tensor(dyad(1), pauli::x())
                     : tensor(COp::identity(2), dyad(0)) + tensor(pauli::x(), dyad(1));
        } else if constexpr (std::is_same_v<T, Rot>) {
          return on(g.target, rotation(g.phi));
        } else if constexpr (std::is_same_v<T, Hadamard>) {
          return on(g.target, hadamard());
        } else if constexpr (std::is_same_v<T, CRot>) {
          return g.control == Qubit::b
                     ? tensor(rotation(g.phi), dyad(0)) + tensor(rotation(-g.phi), dyad(1))
                     : tensor(dyad(0), rotation(g.phi)) + tensor(dyad(1), rotation(-g.phi));
        } else {
          if (!g.u.is_unitary()) throw ValidationError("Unitary1: operator is not unitary");
          return on(g.target, g.u);
        }
      },
      op);
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::x:
      return "x";
    case Mode::y:
      return "y";
    case Mode::z:
      return "z";
  }
  return "?";
}

std::string_view to_string(FrameKind k) {
  switch (k) {
    case FrameKind::standard:
      return "standard";
    case FrameKind::x:
      return "x";
    case FrameKind::y:
      return "y";
    case FrameKind::custom:
      return "custom";
  }
  return "?";
}

Basis Basis::standard() { return {FrameKind::standard, COp::identity(2)}; }

Basis Basis::x() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd f(2, 2);
  f << r, r, r, -r;
  return {FrameKind::x, COp(f)};
}

Basis Basis::y() {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  Eigen::MatrixXcd f(2, 2);
  f << r, r, i * r, -i * r;
  return {FrameKind::y, COp(f)};
}

Basis Basis::of(Mode m) {
  switch (m) {
    case Mode::x:
      return x();
    case Mode::y:
      return y();
    case Mode::z:
      return standard();
  }
  return standard();
}

Basis Basis::custom(const COp& frame) {
  if (frame.dim() != 2) throw DimensionError("Basis::custom: expected a 2x2 frame");
  if (!frame.is_unitary()) throw ValidationError("Basis::custom: frame vectors are not orthonormal");
  return {FrameKind::custom, frame};
}

CVec Basis::state(int k) const { return CVec(Eigen::VectorXcd(f_.mat().col(k))); }

COp rotation(double phi) {
  const double c = std::cos(0.5 * phi), s = std::sin(0.5 * phi);
  Eigen::MatrixXcd m(2, 2);
  m << c, -s, s, c;
  return COp(m);
}

COp hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd m(2, 2);
  m << r, r, r, -r;
  return COp(m);
}

Gate Gate::cnot(Qubit control, const Basis& f) { return {Cnot{control}, f}; }
Gate Gate::rot(Qubit target, double phi, const Basis& f) { return {Rot{target, phi}, f}; }
Gate Gate::h(Qubit target, const Basis& f) { return {Hadamard{target}, f}; }
Gate Gate::crot(Qubit control, double phi, const Basis& f) { return {CRot{control, phi}, f}; }
Gate Gate::unitary(Qubit target, const COp& u, const Basis& f) { return {Unitary1{target, u}, f}; }

COp gate_unitary(const Gate& g) {
  const COp t = textbook(g.op);
  if (g.frame.kind() == FrameKind::standard) return t;
  const COp ff = tensor(g.frame.matrix(), g.frame.matrix());
  return ff * t * ff.adjoint();
}

COp compile(const Circuit& c) {
  COp u = COp::identity(4);
  for (const Gate& g : c.gates) u = gate_unitary(g) * u;
  return u;
}

Isometry circuit_isometry(const Circuit& c) { return isometry_from_unitary(compile(c), c.b_init); }

bool equivalent(const Circuit& c1, const Circuit& c2) {
  return equal_up_to_phase(circuit_isometry(c1), circuit_isometry(c2), kEquivalenceTol);
}

GammaDelta primed(const GammaDelta& gd) { return {0.5 * kPi - gd.gamma, 0.5 * kPi - gd.delta}; }

Circuit build_fig2a(const GammaDelta& gd) {
  return {{Gate::rot(Qubit::b, gd.gamma), Gate::cnot(Qubit::a), Gate::rot(Qubit::b, -gd.delta),
           Gate::cnot(Qubit::b)},
          CVec::basis(2, 0)};
}

Circuit build_fig2c(const GammaDelta& gd) {
  return {{Gate::h(Qubit::a), Gate::cnot(Qubit::a), Gate::rot(Qubit::a, gd.gamma),
           Gate::rot(Qubit::b, gd.delta), Gate::cnot(Qubit::b), Gate::h(Qubit::b)},
          CVec::basis(2, 0)};
}

Circuit build_fig2b(const CanonicalDecomposition& d) {
  Circuit c = build_fig2a(GammaDelta::from_params(d.params));
  c.gates.insert(c.gates.begin(), Gate::unitary(Qubit::a, d.s_o));
  c.gates.push_back(Gate::unitary(Qubit::a, d.s_a));
  c.gates.push_back(Gate::unitary(Qubit::b, d.s_b));
  return c;
}

Circuit build_one_cnot(const GammaDelta& gd) {
  Circuit c = build_fig2a(gd);
  c.gates.pop_back();
  return c;
}

Circuit build_fig3(const GammaDelta& gd_primed, Mode mode, const Basis& frame) {
  const GammaDelta plain = primed(gd_primed);
  double b_angle = 0.0, a_angle = 0.0;
  switch (mode) {
    case Mode::x:
      b_angle = plain.delta;
      a_angle = gd_primed.gamma;
      break;
    case Mode::y:
      b_angle = plain.gamma;
      a_angle = gd_primed.delta;
      break;
    case Mode::z:
      throw ValidationError("build_fig3: mode must be x or y");
  }
  return {{Gate::rot(Qubit::b, b_angle, frame), Gate::cnot(Qubit::a, frame),
           Gate::crot(Qubit::b, a_angle, frame)},
          frame.state(0)};
}

Circuit build_fig3(const GammaDelta& gd_primed, Mode mode) {
  return build_fig3(gd_primed, mode, Basis::of(mode));
}

Circuit build_fig6(const GammaDelta& gd_primed, Mode mode, const Basis& frame) {
  const GammaDelta plain = primed(gd_primed);
  double b_angle = 0.0, a_angle = 0.0;
  switch (mode) {
    case Mode::x:
      b_angle = gd_primed.gamma;
      a_angle = plain.delta;
      break;
    case Mode::y:
      b_angle = gd_primed.delta;
      a_angle = plain.gamma;
      break;
    case Mode::z:
      throw ValidationError("build_fig6: mode must be x or y");
  }
  return {{Gate::rot(Qubit::b, b_angle, frame), Gate::cnot(Qubit::a, frame),
           Gate::crot(Qubit::b, a_angle, frame), Gate::cnot(Qubit::a, frame),
           Gate::cnot(Qubit::b, frame), Gate::cnot(Qubit::a, frame)},
          frame.state(0)};
}

Circuit build_fig6(const GammaDelta& gd_primed, Mode mode) {
  return build_fig6(gd_primed, mode, Basis::of(mode));
}

MeasuredCircuit build_fig7(const GammaDelta& gd_primed) {
  const Basis fx = Basis::x();
  Circuit pre = build_fig3(gd_primed, Mode::x);
  pre.gates.pop_back();
  const COp& f = fx.matrix();
  MeasuredCircuit mc;
  mc.pre = std::move(pre);
  mc.measurement = fx;
  mc.conditional = {f * rotation(gd_primed.gamma) * f.adjoint(),
                    f * rotation(-gd_primed.gamma) * f.adjoint()};
  return mc;
}

COp output_state(const Circuit& c, const COp& rho_in) {
  if (rho_in.dim() != 2 || !rho_in.is_density(1e-10)) {
    throw ValidationError("output_state: input is not a one-qubit density");
  }
  const COp u = compile(c);
  return u * tensor(rho_in, COp::projector(c.b_init)) * u.adjoint();
}

std::array<MeasuredBranch, 2> measured_branches(const MeasuredCircuit& mc, const COp& rho_in) {
  const COp rho = output_state(mc.pre, rho_in);
  std::array<MeasuredBranch, 2> out;
  for (int k = 0; k < 2; ++k) {
    const COp p = on(Qubit::b, COp::projector(mc.measurement.state(k)));
    const COp c = on(Qubit::a, mc.conditional[k]);
    const COp post = c * p * rho * p * c.adjoint();
    out[k].probability = post.trace().real();
    out[k].rho_ab = out[k].probability > 0.0 ? post * (1.0 / out[k].probability) : COp::zero(4);
  }
  return out;
}

COp bob_output(const MeasuredCircuit& mc, const COp& rho_in) {
  COp sum = COp::zero(2);
  for (const MeasuredBranch& b : measured_branches(mc, rho_in)) {
    sum = sum + partial_trace(b.rho_ab, Qubit::a) * b.probability;
  }
  return sum;
}

std::array<std::array<double, 2>, 2> joint_outcomes(const COp& rho_ab, const Basis& bob,
                                                   const Basis& eve) {
  std::array<std::array<double, 2>, 2> p{};
  for (int k = 0; k < 2; ++k) {
    for (int m = 0; m < 2; ++m) {
      const COp proj =
          tensor(COp::projector(bob.state(m)), COp::projector(eve.state(k)));
      p[k][m] = (proj * rho_ab).trace().real();
    }
  }
  return p;
}

std::array<std::array<double, 2>, 2> joint_outcomes(const MeasuredCircuit& mc, const COp& rho_in,
                                                   const Basis& bob) {
  std::array<std::array<double, 2>, 2> p{};
  const auto branches = measured_branches(mc, rho_in);
  for (int k = 0; k < 2; ++k) {
    if (branches[k].probability == 0.0) continue;
    const COp rho_a = partial_trace(branches[k].rho_ab, Qubit::a);
    for (int m = 0; m < 2; ++m) {
      p[k][m] = branches[k].probability *
                (COp::projector(bob.state(m)) * rho_a).trace().real();
    }
  }
  return p;
}

}  // namespace qcopier
