#include "qcopier/protocols.hpp"

#include <cmath>

#include "qcopier/golden.hpp"

namespace qcopier {

namespace {

constexpr double kPureTol = 1e-10;

/// Runs body(i, acc) for every trial and sums the per-thread accumulators.
/// Accumulators hold integer counts, so the sum is order independent.
template <class Acc, class Body>
Acc run_trials(std::uint64_t n, Exec exec, Body&& body) {
  Acc total{};
  if (exec == Exec::serial) {
    for (std::uint64_t i = 0; i < n; ++i) body(i, total);
    return total;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel
  {
    Acc local{};
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::uint64_t>(i), local);
#pragma omp critical(qcopier_trial_merge)
    total += local;
  }
  return total;
}

/// Picks an index from a probability table with one uniform draw.
template <std::size_t N>
std::size_t pick(const std::array<double, N>& w, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    acc += w[k];
    if (u < acc) return k;
  }
  for (std::size_t k = N; k-- > 0;) {
    if (w[k] > 0.0) return k;
  }
  return 0;
}

int mode_index(Mode m) { return static_cast<int>(m); }

double frac(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ModeCounters& operator+=(ModeCounters& x, const ModeCounters& y) {
  for (int b = 0; b < 2; ++b) {
    x.sent[b] += y.sent[b];
    x.bob_errors[b] += y.bob_errors[b];
    x.eve_errors[b] += y.eve_errors[b];
  }
  return x;
}

struct Bb84Acc {
  std::array<ModeCounters, 3> c{};
  Bb84Acc& operator+=(const Bb84Acc& o) {
    for (int m = 0; m < 3; ++m) c[m] += o.c[m];
    return *this;
  }
};

/// Joint (Eve, Bob) outcome table for a pure input through one isometry,
/// both measuring in `mode`: entry 2*eve + bob.
std::array<double, 4> bb84_table(const Isometry& v, Mode mode, int bit) {
  const Basis f = Basis::of(mode);
  const CVec out = v.apply(f.state(bit));
  const auto p = joint_outcomes(COp::projector(out), f, f);
  return {p[0][0], p[0][1], p[1][0], p[1][1]};
}

Bb84Result run_bb84(const Bb84Config& cfg, const StochasticCopier& sc, Exec exec) {
  if (cfg.n_trials < 1) throw ValidationError("bb84: n_trials must be at least 1");
  if (cfg.modes.empty()) throw ValidationError("bb84: no modes enabled");

  // tables[branch][mode][bit]
  std::vector<std::array<std::array<std::array<double, 4>, 2>, 3>> tables(sc.size());
  for (std::size_t b = 0; b < sc.size(); ++b) {
    for (const Mode m : {Mode::x, Mode::y, Mode::z}) {
      for (int bit = 0; bit < 2; ++bit) tables[b][mode_index(m)][bit] = bb84_table(sc.branches()[b].v, m, bit);
    }
  }

  Bb84Result res;
  if (cfg.keep_records) res.ledger.records.resize(cfg.n_trials);
  const auto n_modes = static_cast<double>(cfg.modes.size());
  auto trial = [&](std::uint64_t i, Bb84Acc& acc) {
    CounterRng rng(cfg.seed, i);
    const auto mi = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * n_modes),
                                          cfg.modes.size() - 1);
    const Mode mode = cfg.modes[mi];
    const int bit = rng.bit();
    const std::size_t branch = sample_branch(sc, rng);
    const std::size_t cell = pick(tables[branch][mode_index(mode)][bit], rng.uniform());
    const int eve = static_cast<int>(cell / 2), bob = static_cast<int>(cell % 2);

    ModeCounters& mc = acc.c[mode_index(mode)];
    ++mc.sent[bit];
    if (bob != bit) ++mc.bob_errors[bit];
    if (eve != bit) ++mc.eve_errors[bit];
    if (cfg.keep_records) {
      res.ledger.records[i] = {static_cast<std::uint8_t>(mode_index(mode)),
                               static_cast<std::uint8_t>(bit), static_cast<std::uint8_t>(bob),
                               static_cast<std::uint8_t>(eve), static_cast<std::uint8_t>(branch)};
    }
  };
  res.ledger.counters = run_trials<Bb84Acc>(cfg.n_trials, exec, trial).c;

  const ModeCounters& x = res.ledger[Mode::x];
  const ModeCounters& y = res.ledger[Mode::y];
  res.empirical = {x.p(), x.q(), y.p(), y.q()};
  return res;
}

}  // namespace

double ModeCounters::p() const { return frac(bob_errors[0] + bob_errors[1], total_sent()); }
double ModeCounters::q() const { return frac(eve_errors[0] + eve_errors[1], total_sent()); }
double ModeCounters::p_bit(int b) const { return frac(bob_errors[b], sent[b]); }
double ModeCounters::q_bit(int b) const { return frac(eve_errors[b], sent[b]); }

double disturbance(const BlochVector& r_in, const COp& rho_out) {
  if (std::abs(r_in.norm() - 1.0) > kPureTol) throw ValidationError("disturbance: input is not pure");
  const BlochVector r_out = density_to_bloch(rho_out);
  return 0.5 * (1.0 - r_in.r.dot(r_out.r));
}

ErrorRates bb84_analytic_rates(double gamma, double delta) {
  return {0.5 * (1.0 - std::sin(gamma)), 0.5 * (1.0 - std::cos(delta)),
          0.5 * (1.0 - std::sin(delta)), 0.5 * (1.0 - std::cos(gamma))};
}

ModeRates analytic_mode_rates(const StochasticCopier& sc, Mode mode) {
  const Basis f = Basis::of(mode);
  ModeRates r;
  for (int bit = 0; bit < 2; ++bit) {
    const BlochVector in = density_to_bloch(COp::projector(f.state(bit)));
    const ReducedOutputs o = mixed_output(sc, COp::projector(f.state(bit)));
    r.p += 0.5 * disturbance(in, o.rho_a);
    r.q += 0.5 * disturbance(in, o.rho_b);
  }
  return r;
}

Bb84Result simulate_bb84(const Bb84Config& cfg, Exec exec) {
  const StochasticCopier sc =
      StochasticCopier::single(canonical_isometry(GammaDelta{cfg.gamma, cfg.delta}.params()));
  Bb84Result res = run_bb84(cfg, sc, exec);
  res.analytic = bb84_analytic_rates(cfg.gamma, cfg.delta);
  return res;
}

Bb84Result simulate_bb84(const Bb84Config& cfg, const StochasticCopier& sc, Exec exec) {
  Bb84Result res = run_bb84(cfg, sc, exec);
  const ModeRates x = analytic_mode_rates(sc, Mode::x);
  const ModeRates y = analytic_mode_rates(sc, Mode::y);
  res.analytic = {x.p, x.q, y.p, y.q};
  return res;
}

ClassicalRates classical_equivalent_bb84(double p, double q, std::uint64_t n, std::uint64_t seed,
                                         Exec exec) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw ValidationError("classical_equivalent_bb84: flip probabilities outside [0, 1]");
  }
  struct Acc {
    std::uint64_t a_err = 0, b_err = 0;
    Acc& operator+=(const Acc& o) {
      a_err += o.a_err;
      b_err += o.b_err;
      return *this;
    }
  };
  const Acc acc = run_trials<Acc>(n, exec, [&](std::uint64_t i, Acc& a) {
    CounterRng rng(seed, i);
    const int sent = rng.bit();
    int bob = sent;   // a
    int eve = sent;   // b after the CNOT copy
    if (rng.uniform() < p) bob ^= 1;
    if (rng.uniform() < q) eve ^= 1;
    if (bob != sent) ++a.a_err;
    if (eve != sent) ++a.b_err;
  });
  return {frac(acc.a_err, n), frac(acc.b_err, n), n};
}

ModeRates classical_flip_probabilities(const GammaDelta& gd, Mode mode) {
  const GammaDelta pr = primed(gd);
  auto s2 = [](double x) { return std::pow(std::sin(0.5 * x), 2); };
  switch (mode) {
    case Mode::x:
      return {s2(pr.gamma), s2(gd.delta)};
    case Mode::y:
      return {s2(pr.delta), s2(gd.gamma)};
    case Mode::z:
      break;
  }
  throw ValidationError("classical_flip_probabilities: mode must be x or y");
}

ConsistencyReport consistency_check(const GammaDelta& gd_primed, Mode frame) {
  const Circuit c = build_fig3(gd_primed, frame);
  const Basis f = Basis::of(frame);
  const COp u1 = gate_unitary(c.gates[0]);
  const COp u2 = gate_unitary(c.gates[1]);
  const COp u3 = gate_unitary(c.gates[2]);
  auto proj = [&](int a, int b) {
    return tensor(COp::projector(f.state(a)), COp::projector(f.state(b)));
  };
  auto proj_b = [&](int b) { return tensor(COp::identity(2), COp::projector(f.state(b))); };

  std::array<COp, 8> chain;
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int bf = 0; bf < 2; ++bf) {
      for (int af = 0; af < 2; ++af) {
        const COp p0 = proj(a0, 0);
        const COp p1 = proj_b(bf);
        const COp p2 = proj(a0, a0 ^ bf);
        const COp p3 = proj(a0 ^ af, a0 ^ bf);
        chain[ConsistencyReport::index(a0, bf, af)] = p3 * u3 * p2 * u2 * p1 * u1 * p0;
      }
    }
  }
  const COp rho0 = proj(0, 0) + proj(1, 0);

  ConsistencyReport rep;
  for (int h = 0; h < 8; ++h) {
    for (int k = 0; k < 8; ++k) {
      rep.gram(h, k) = (chain[h] * rho0 * chain[k].adjoint()).trace();
      if (h != k) rep.max_offdiagonal = std::max(rep.max_offdiagonal, std::abs(rep.gram(h, k)));
    }
    rep.weights[h] = rep.gram(h, h).real();
  }
  return rep;
}

std::array<CVec, 2> b92_states(double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar < 0.25 * kPi)) {
    throw ValidationError("b92_states: alpha_bar must lie in (0, pi/4)");
  }
  const Basis x = Basis::x();
  const double c = std::cos(alpha_bar), s = std::sin(alpha_bar);
  return {x.state(0) * c + x.state(1) * s, x.state(0) * s + x.state(1) * c};
}

namespace {

/// For a sent state: Eve's outcome probabilities and Bob's conditional states.
struct EveSplit {
  std::array<double, 2> p{};
  std::array<COp, 2> rho_bob{COp::zero(2), COp::zero(2)};
};

EveSplit eve_split(B92Machine machine, const GammaDelta& gp, const CVec& sent) {
  const COp rho_in = COp::projector(sent);
  EveSplit s;
  if (machine == B92Machine::fig7) {
    const auto br = measured_branches(build_fig7(gp), rho_in);
    for (int k = 0; k < 2; ++k) {
      s.p[k] = br[k].probability;
      if (s.p[k] > 0.0) s.rho_bob[k] = partial_trace(br[k].rho_ab, Qubit::a);
    }
  } else {
    const COp full = output_state(build_fig3(gp, Mode::x), rho_in);
    const Basis x = Basis::x();
    for (int k = 0; k < 2; ++k) {
      const COp pk = tensor(COp::identity(2), COp::projector(x.state(k)));
      const COp post = pk * full * pk;
      s.p[k] = post.trace().real();
      if (s.p[k] > 0.0) s.rho_bob[k] = partial_trace(post, Qubit::a) * (1.0 / s.p[k]);
    }
  }
  return s;
}

double fidelity(const CVec& psi, const COp& rho) { return inner(psi, rho * psi).real(); }

CVec perp2(const CVec& v) { return CVec{-std::conj(v[1]), std::conj(v[0])}; }

GammaDelta b92_primed(double delta, double gamma_prime) { return {gamma_prime, 0.5 * kPi - delta}; }

}  // namespace

double b92_noise(double alpha_bar, double delta, double gamma_prime) {
  const auto kappa = b92_states(alpha_bar);
  const Circuit c = build_fig3(b92_primed(delta, gamma_prime), Mode::x);
  double sum = 0.0;
  for (const CVec& k : kappa) {
    const COp rho_in = COp::projector(k);
    const COp out = partial_trace(output_state(c, rho_in), Qubit::a);
    sum += disturbance(density_to_bloch(rho_in), out);
  }
  return 0.5 * sum;
}

double optimize_gamma_prime(double alpha_bar, double delta) {
  b92_states(alpha_bar);  // range check
  return golden_section_minimize([&](double g) { return b92_noise(alpha_bar, delta, g); }, 0.0, kPi,
                                 1e-9)
      .x;
}

B92Stats simulate_b92(const B92Config& cfg, Exec exec) {
  if (cfg.n_trials < 1) throw ValidationError("b92: n_trials must be at least 1");
  const auto kappa = b92_states(cfg.alpha_bar);
  B92Stats st;
  st.gamma_prime = cfg.gamma_prime ? *cfg.gamma_prime : optimize_gamma_prime(cfg.alpha_bar, cfg.delta);
  const GammaDelta gp = b92_primed(cfg.delta, st.gamma_prime);

  // table[i][j]: entries 2*k + o for Eve outcome k and Bob outcome o
  // (o = 0: kappa_j, o = 1: kappa_j-perp, conclusive).
  std::array<std::array<std::array<double, 4>, 2>, 2> table{};
  for (int i = 0; i < 2; ++i) {
    const EveSplit s = eve_split(cfg.machine, gp, kappa[i]);
    COp avg = COp::zero(2);
    for (int k = 0; k < 2; ++k) {
      if (s.p[k] > 0.0) avg = avg + s.rho_bob[k] * s.p[k];
    }
    st.exact_disturbance += 0.5 * disturbance(density_to_bloch(COp::projector(kappa[i])), avg);
    st.exact_eve_success += 0.5 * s.p[i];
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (s.p[k] == 0.0) continue;
        const double f_same = fidelity(kappa[j], s.rho_bob[k]);
        table[i][j][2 * k] = s.p[k] * f_same;
        table[i][j][2 * k + 1] = s.p[k] * fidelity(perp2(kappa[j]), s.rho_bob[k]);
      }
    }
  }

  struct Acc {
    std::uint64_t eve_right = 0, conclusive = 0, dist_trials = 0, dist_errors = 0;
    Acc& operator+=(const Acc& o) {
      eve_right += o.eve_right;
      conclusive += o.conclusive;
      dist_trials += o.dist_trials;
      dist_errors += o.dist_errors;
      return *this;
    }
  };
  const Acc acc = run_trials<Acc>(cfg.n_trials, exec, [&](std::uint64_t t, Acc& a) {
    CounterRng rng(cfg.seed, t);
    const int sent = rng.bit();
    const int basis = rng.bit();
    const std::size_t cell = pick(table[sent][basis], rng.uniform());
    const int eve = static_cast<int>(cell / 2), bob = static_cast<int>(cell % 2);
    if (eve == sent) ++a.eve_right;  // outcome 0_x -> guess kappa0
    if (bob == 1) ++a.conclusive;
    if (basis == sent) {
      ++a.dist_trials;
      if (bob == 1) ++a.dist_errors;
    }
  });
  st.n_trials = cfg.n_trials;
  st.n_disturbance_trials = acc.dist_trials;
  st.eve_success = frac(acc.eve_right, cfg.n_trials);
  st.conclusive_rate = frac(acc.conclusive, cfg.n_trials);
  st.bob_disturbance = frac(acc.dist_errors, acc.dist_trials);
  return st;
}

FuchsPeresParams fuchs_peres_param_map(double delta, double gamma_prime) {
  return {0.5 * delta, 0.5 * gamma_prime};
}

}  // namespace qcopier
