#include <catch_amalgamated.hpp>

#include <cmath>

#include "qcopier/protocols.hpp"

using namespace qcopier;
using Catch::Matchers::WithinAbs;

namespace {

double sigma(double r, double n) { return std::sqrt(r * (1.0 - r) / n); }

/// 4-sigma band around an exact rate; zero-variance rates must match exactly.
bool within_band(double measured, double expected, double n) {
  const double s = sigma(expected, n);
  if (s == 0.0) return measured == expected;
  return std::abs(measured - expected) < 4.0 * s;
}

/// Two independent estimates of the same rate.
bool agree(double r1, double n1, double r2, double n2) {
  const double r = 0.5 * (r1 + r2);
  const double s = std::sqrt(r * (1.0 - r) * (1.0 / n1 + 1.0 / n2));
  if (s == 0.0) return r1 == r2;
  return std::abs(r1 - r2) < 4.0 * s;
}

double n_of(const ModeCounters& c) { return static_cast<double>(c.total_sent()); }

}  // namespace

TEST_CASE("disturbance") {
  const BlochVector x{{1, 0, 0}};
  CHECK_THAT(disturbance(x, bloch_to_density(x)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(disturbance(x, bloch_to_density(BlochVector{{-1, 0, 0}})), WithinAbs(1.0, 1e-15));
  CHECK_THAT(disturbance(x, COp::identity(2) * 0.5), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(disturbance(BlochVector{{0.5, 0, 0}}, COp::identity(2) * 0.5), ValidationError);
}

TEST_CASE("bb84 analytic rates") {
  SECTION("optimal x strategy") {
    const ErrorRates r = bb84_analytic_rates(kPi / 2, 0.0);
    CHECK(r.p_x == 0.0);
    CHECK(r.q_x == 0.0);
    // pi/2 itself is rounded, so cos(pi/2) is off by one ulp
    CHECK_THAT(r.p_y, WithinAbs(0.5, 1e-15));
    CHECK_THAT(r.q_y, WithinAbs(0.5, 1e-15));
  }
  SECTION("symmetric point") {
    const ErrorRates r = bb84_analytic_rates(kPi / 4, kPi / 4);
    const double v = (1.0 - std::sqrt(2.0) / 2.0) / 2.0;
    for (const double x : {r.p_x, r.q_x, r.p_y, r.q_y}) CHECK_THAT(x, WithinAbs(v, 1e-15));
    CHECK_THAT(v, WithinAbs(0.146447, 1e-6));
  }
  SECTION("roles swapped") {
    const ErrorRates r = bb84_analytic_rates(0.0, kPi / 2);
    CHECK_THAT(r.p_x, WithinAbs(0.5, 1e-15));
    CHECK_THAT(r.q_x, WithinAbs(0.5, 1e-15));
    CHECK_THAT(r.p_y, WithinAbs(0.0, 1e-15));
    CHECK_THAT(r.q_y, WithinAbs(0.0, 1e-15));
  }
  SECTION("complementarity circles on a 20x20 grid") {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double g = kPi / 2 * i / 19.0, d = kPi / 2 * j / 19.0;
        const ErrorRates r = bb84_analytic_rates(g, d);
        worst = std::max(worst, std::abs(std::pow(0.5 - r.q_x, 2) + std::pow(0.5 - r.p_y, 2) - 0.25));
        worst = std::max(worst, std::abs(std::pow(0.5 - r.q_y, 2) + std::pow(0.5 - r.p_x, 2) - 0.25));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("analytic mode rates of the canonical copier match the closed form") {
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) {
      const double g = kPi / 2 * i / 6.0, d = kPi / 2 * j / 6.0;
      const StochasticCopier sc = StochasticCopier::single(canonical_isometry(GammaDelta{g, d}.params()));
      const ErrorRates r = bb84_analytic_rates(g, d);
      const ModeRates x = analytic_mode_rates(sc, Mode::x);
      const ModeRates y = analytic_mode_rates(sc, Mode::y);
      CHECK_THAT(x.p, WithinAbs(r.p_x, 1e-12));
      CHECK_THAT(x.q, WithinAbs(r.q_x, 1e-12));
      CHECK_THAT(y.p, WithinAbs(r.p_y, 1e-12));
      CHECK_THAT(y.q, WithinAbs(r.q_y, 1e-12));
    }
  }
}

TEST_CASE("bb84 monte carlo") {
  SECTION("optimal x strategy") {
    Bb84Config cfg{kPi / 2, 0.0, 100000, 11};
    const Bb84Result res = simulate_bb84(cfg);
    CHECK(res.empirical.p_x == 0.0);
    CHECK(res.empirical.q_x == 0.0);
    const double ny = n_of(res.ledger[Mode::y]);
    CHECK(within_band(res.empirical.p_y, 0.5, ny));
    CHECK(within_band(res.empirical.q_y, 0.5, ny));
  }
  SECTION("symmetric point, 2e5 trials") {
    Bb84Config cfg{kPi / 4, kPi / 4, 200000, 12};
    const Bb84Result res = simulate_bb84(cfg);
    const double v = (1.0 - std::sqrt(2.0) / 2.0) / 2.0;
    const double nx = n_of(res.ledger[Mode::x]), ny = n_of(res.ledger[Mode::y]);
    CHECK(nx + ny == 200000.0);
    CHECK(within_band(res.empirical.p_x, v, nx));
    CHECK(within_band(res.empirical.q_x, v, nx));
    CHECK(within_band(res.empirical.p_y, v, ny));
    CHECK(within_band(res.empirical.q_y, v, ny));
  }
  SECTION("per-bit symmetry in x and y") {
    Bb84Config cfg{0.9, 0.4, 200000, 13};
    const Bb84Result res = simulate_bb84(cfg);
    for (const Mode m : {Mode::x, Mode::y}) {
      const ModeCounters& c = res.ledger[m];
      const double n0 = static_cast<double>(c.sent[0]), n1 = static_cast<double>(c.sent[1]);
      CHECK(agree(c.p_bit(0), n0, c.p_bit(1), n1));
      CHECK(agree(c.q_bit(0), n0, c.q_bit(1), n1));
    }
  }
  SECTION("z mode of the centered copier is symmetric") {
    Bb84Config cfg{0.6, 0.3, 300000, 14, {Mode::x, Mode::y, Mode::z}};
    const Bb84Result res = simulate_bb84(cfg, centered_copier({0.6, 0.3}, 0.5));
    const ModeCounters& z = res.ledger[Mode::z];
    CHECK(z.total_sent() > 0);
    const double n0 = static_cast<double>(z.sent[0]), n1 = static_cast<double>(z.sent[1]);
    CHECK(agree(z.p_bit(0), n0, z.p_bit(1), n1));
    CHECK(agree(z.q_bit(0), n0, z.q_bit(1), n1));
  }
  SECTION("z mode of a plain copier is not symmetric") {
    Bb84Config cfg{0.6, 0.3, 100000, 15, {Mode::z}};
    const Bb84Result res = simulate_bb84(cfg);
    const ModeCounters& z = res.ledger[Mode::z];
    const double zeta = 0.3, eta = 0.9;
    const double e0 = std::pow(std::sin(0.5 * zeta), 2), e1 = std::pow(std::sin(0.5 * eta), 2);
    const double n0 = static_cast<double>(z.sent[0]), n1 = static_cast<double>(z.sent[1]);
    CHECK(within_band(z.p_bit(0), e0, n0));
    CHECK(within_band(z.p_bit(1), 1.0 - e1, n1));
    CHECK(within_band(z.q_bit(0), e0, n0));
    CHECK(within_band(z.q_bit(1), e1, n1));
    CHECK_FALSE(agree(z.p_bit(0), n0, z.p_bit(1), n1));
  }
}

TEST_CASE("bb84 ledger") {
  Bb84Config cfg{0.7, 0.2, 5000, 21, {Mode::x, Mode::y, Mode::z}, true};
  const Bb84Result serial = simulate_bb84(cfg, Exec::serial);
  const Bb84Result parallel = simulate_bb84(cfg, Exec::parallel);
  REQUIRE(serial.ledger.records.size() == 5000);

  std::array<ModeCounters, 3> tally{};
  for (const TrialRecord& r : serial.ledger.records) {
    ModeCounters& c = tally[r.mode];
    ++c.sent[r.bit];
    if (r.bob != r.bit) ++c.bob_errors[r.bit];
    if (r.eve != r.bit) ++c.eve_errors[r.bit];
  }
  for (int m = 0; m < 3; ++m) {
    CHECK(tally[m].sent == serial.ledger.counters[m].sent);
    CHECK(tally[m].bob_errors == serial.ledger.counters[m].bob_errors);
    CHECK(tally[m].eve_errors == serial.ledger.counters[m].eve_errors);
  }

  SECTION("serial and parallel runs are identical") {
    for (std::size_t i = 0; i < 5000; ++i) {
      const TrialRecord& a = serial.ledger.records[i];
      const TrialRecord& b = parallel.ledger.records[i];
      REQUIRE((a.mode == b.mode && a.bit == b.bit && a.bob == b.bob && a.eve == b.eve));
    }
    CHECK(serial.empirical.p_x == parallel.empirical.p_x);
    CHECK(serial.empirical.q_y == parallel.empirical.q_y);
  }
  SECTION("different seeds differ") {
    cfg.seed = 22;
    const Bb84Result other = simulate_bb84(cfg, Exec::serial);
    int same = 0;
    for (std::size_t i = 0; i < 5000; ++i) {
      same += other.ledger.records[i].bit == serial.ledger.records[i].bit;
    }
    CHECK(same < 4000);
  }
  SECTION("validation") {
    cfg.n_trials = 0;
    CHECK_THROWS_AS(simulate_bb84(cfg), ValidationError);
    cfg.n_trials = 10;
    cfg.modes.clear();
    CHECK_THROWS_AS(simulate_bb84(cfg), ValidationError);
  }
}

TEST_CASE("classical equivalent") {
  SECTION("no flips, no errors") {
    const ClassicalRates r = classical_equivalent_bb84(0.0, 0.0, 10000, 1);
    CHECK(r.p == 0.0);
    CHECK(r.q == 0.0);
  }
  SECTION("certain flips") {
    const ClassicalRates r = classical_equivalent_bb84(1.0, 1.0, 1000, 1);
    CHECK(r.p == 1.0);
    CHECK(r.q == 1.0);
  }
  SECTION("range check") {
    CHECK_THROWS_AS(classical_equivalent_bb84(-0.1, 0.0, 10, 1), ValidationError);
    CHECK_THROWS_AS(classical_equivalent_bb84(0.0, 1.5, 10, 1), ValidationError);
  }
  SECTION("flip probabilities equal the analytic rates") {
    for (const GammaDelta gd : {GammaDelta{kPi / 4, kPi / 4}, GammaDelta{1.2, 0.3}, GammaDelta{0.4, 1.1}}) {
      const ErrorRates r = bb84_analytic_rates(gd.gamma, gd.delta);
      const ModeRates x = classical_flip_probabilities(gd, Mode::x);
      const ModeRates y = classical_flip_probabilities(gd, Mode::y);
      CHECK_THAT(x.p, WithinAbs(r.p_x, 1e-12));
      CHECK_THAT(x.q, WithinAbs(r.q_x, 1e-12));
      CHECK_THAT(y.p, WithinAbs(r.p_y, 1e-12));
      CHECK_THAT(y.q, WithinAbs(r.q_y, 1e-12));
    }
    CHECK_THROWS_AS(classical_flip_probabilities({0.1, 0.2}, Mode::z), ValidationError);
  }
  SECTION("matches the quantum simulation per mode") {
    std::uint64_t seed = 100;
    for (const GammaDelta gd : {GammaDelta{kPi / 4, kPi / 4}, GammaDelta{1.2, 0.3}, GammaDelta{0.4, 1.1}}) {
      for (const Mode m : {Mode::x, Mode::y}) {
        const std::uint64_t n = 100000;
        const Bb84Result qr = simulate_bb84({gd.gamma, gd.delta, n, seed++, {m}});
        const ModeRates flips = classical_flip_probabilities(gd, m);
        const ClassicalRates cr = classical_equivalent_bb84(flips.p, flips.q, n, seed++);
        const ModeCounters& c = qr.ledger[m];
        CHECK(agree(c.p(), n_of(c), cr.p, static_cast<double>(n)));
        CHECK(agree(c.q(), n_of(c), cr.q, static_cast<double>(n)));
      }
    }
  }
  SECTION("serial and parallel agree") {
    const ClassicalRates a = classical_equivalent_bb84(0.3, 0.2, 20000, 5, Exec::serial);
    const ClassicalRates b = classical_equivalent_bb84(0.3, 0.2, 20000, 5, Exec::parallel);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
  }
}

TEST_CASE("history consistency") {
  for (int k = 0; k < 10; ++k) {
    const double gp = 0.1 + 0.3 * k, d = 0.05 + 0.15 * k;
    for (const Mode frame : {Mode::x, Mode::y}) {
      const GammaDelta gd_primed = frame == Mode::x ? GammaDelta{gp, kPi / 2 - d} : GammaDelta{kPi / 2 - d, gp};
      const ConsistencyReport rep = consistency_check(gd_primed, frame);
      CHECK(rep.max_offdiagonal <= 1e-10);
      // b flips with sin^2 of half the b angle, a with sin^2 of half the a angle
      const double q = std::pow(std::sin(0.5 * d), 2), p = std::pow(std::sin(0.5 * gp), 2);
      for (int a0 = 0; a0 < 2; ++a0) {
        CHECK_THAT(rep.weights[ConsistencyReport::index(a0, 0, 0)], WithinAbs((1 - q) * (1 - p), 1e-12));
        CHECK_THAT(rep.weights[ConsistencyReport::index(a0, 0, 1)], WithinAbs((1 - q) * p, 1e-12));
        CHECK_THAT(rep.weights[ConsistencyReport::index(a0, 1, 0)], WithinAbs(q * (1 - p), 1e-12));
        CHECK_THAT(rep.weights[ConsistencyReport::index(a0, 1, 1)], WithinAbs(q * p, 1e-12));
      }
      for (int h = 0; h < 8; ++h) CHECK(std::abs(rep.gram(h, h).imag()) < 1e-14);
    }
  }
  SECTION("delta = 0 leaves two histories per initial state") {
    const ConsistencyReport rep = consistency_check({0.7, kPi / 2}, Mode::x);
    int nonzero = 0;
    for (int h = 0; h < 4; ++h) nonzero += rep.weights[h] > 1e-14;
    CHECK(nonzero == 2);
  }
}

TEST_CASE("b92 states") {
  const auto k = b92_states(kPi / 8);
  CHECK_THAT(std::abs(inner(k[0], k[1])), WithinAbs(std::sqrt(2.0) / 2.0, 1e-15));
  for (int i = 1; i <= 20; ++i) {
    const double a = kPi / 4 * i / 21.0;
    const auto s = b92_states(a);
    CHECK_THAT(s[0].norm(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(s[1].norm(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(inner(s[0], s[1]).real(), WithinAbs(std::sin(2 * a), 1e-15));
  }
  CHECK_THROWS_AS(b92_states(kPi / 4), ValidationError);
  CHECK_THROWS_AS(b92_states(0.0), ValidationError);
  CHECK_THROWS_AS(b92_states(1.0), ValidationError);
}

TEST_CASE("b92 noise and optimization") {
  const double ab = kPi / 8;
  SECTION("closed-form optimum") {
    // mean fidelity is (1 + A cos g + B sin g)/2 with
    // A = cos^2 2a + sin^2 2a sin d, B = sin 2a cos d
    for (const double d : {0.0, 0.4, 0.9, 1.3}) {
      const double s = std::sin(2 * ab), c = std::cos(2 * ab);
      const double a = c * c + s * s * std::sin(d), b = s * std::cos(d);
      const double g = optimize_gamma_prime(ab, d);
      CHECK_THAT(g, WithinAbs(std::atan2(b, a), 1e-7));
      CHECK_THAT(b92_noise(ab, d, g), WithinAbs(0.5 * (1.0 - std::hypot(a, b)), 1e-12));
    }
    CHECK_THAT(optimize_gamma_prime(ab, 0.0), WithinAbs(0.95532, 1e-5));
    CHECK_THAT(b92_noise(ab, 0.0, optimize_gamma_prime(ab, 0.0)), WithinAbs(0.0669873, 1e-7));
  }
  SECTION("local minimum certificate") {
    for (const double d : {0.0, 0.5, 1.0, 1.5}) {
      const double g = optimize_gamma_prime(ab, d);
      const double n0 = b92_noise(ab, d, g);
      CHECK(b92_noise(ab, d, g + 1e-4) >= n0 - 1e-10);
      if (g >= 1e-4) CHECK(b92_noise(ab, d, g - 1e-4) >= n0 - 1e-10);
    }
  }
  SECTION("noise is non-increasing in delta") {
    double prev = 1.0;
    for (int i = 0; i < 20; ++i) {
      const double d = kPi / 2 * i / 19.0;
      const double n = b92_noise(ab, d, optimize_gamma_prime(ab, d));
      CHECK(n <= prev + 1e-12);
      prev = n;
    }
  }
  SECTION("delta = pi/2 gives a noiseless identity channel") {
    const double g = optimize_gamma_prime(ab, kPi / 2);
    CHECK(g < 1e-6);
    CHECK(b92_noise(ab, kPi / 2, g) < 1e-12);
  }
  SECTION("param map") {
    const FuchsPeresParams fp = fuchs_peres_param_map(0.6, 1.4);
    CHECK(fp.phi == 0.3);
    CHECK(fp.theta == 0.7);
  }
}

TEST_CASE("b92 monte carlo") {
  const double ab = kPi / 8;
  const std::uint64_t n = 200000;
  SECTION("delta = 0 reaches the Helstrom value") {
    const B92Stats st = simulate_b92({ab, 0.0, std::nullopt, n, 31});
    const double helstrom = std::pow(std::cos(ab), 2);
    CHECK_THAT(helstrom, WithinAbs(0.853553, 1e-6));
    CHECK(within_band(st.eve_success, helstrom, static_cast<double>(n)));
    CHECK_THAT(st.exact_eve_success, WithinAbs(helstrom, 1e-12));
    CHECK_THAT(st.exact_disturbance, WithinAbs(b92_noise(ab, 0.0, st.gamma_prime), 1e-12));
  }
  SECTION("delta = pi/2 leaves Eve guessing") {
    const B92Stats st = simulate_b92({ab, kPi / 2, std::nullopt, n, 32});
    CHECK(within_band(st.eve_success, 0.5, static_cast<double>(n)));
  }
  SECTION("gamma' = 0, delta = 0 decoheres Bob's qubit in the x basis") {
    const B92Stats st = simulate_b92({ab, 0.0, 0.0, n, 33});
    const double expect = 0.5 * std::pow(std::sin(2 * ab), 2);
    CHECK(within_band(st.bob_disturbance, expect, static_cast<double>(st.n_disturbance_trials)));
    CHECK_THAT(st.exact_disturbance, WithinAbs(expect, 1e-12));
  }
  SECTION("measured and unitary machines agree") {
    for (const double d : {0.0, 0.7, 1.2}) {
      B92Config cfg{ab, d, std::nullopt, n, 34};
      const B92Stats a = simulate_b92(cfg);
      cfg.machine = B92Machine::fig3a;
      cfg.seed = 35;
      const B92Stats b = simulate_b92(cfg);
      CHECK(agree(a.bob_disturbance, static_cast<double>(a.n_disturbance_trials), b.bob_disturbance,
                  static_cast<double>(b.n_disturbance_trials)));
      CHECK_THAT(a.exact_disturbance, WithinAbs(b.exact_disturbance, 1e-12));
      CHECK(agree(a.eve_success, static_cast<double>(n), b.eve_success, static_cast<double>(n)));
    }
  }
  SECTION("no eavesdropper leaves Bob undisturbed") {
    const B92Stats st = simulate_b92({ab, kPi / 2, 0.0, 50000, 36});
    CHECK(st.bob_disturbance == 0.0);
    CHECK(st.conclusive_rate > 0.0);
  }
  SECTION("serial and parallel agree") {
    const B92Config cfg{ab, 0.3, std::nullopt, 20000, 37};
    const B92Stats a = simulate_b92(cfg, Exec::serial);
    const B92Stats b = simulate_b92(cfg, Exec::parallel);
    CHECK(a.eve_success == b.eve_success);
    CHECK(a.bob_disturbance == b.bob_disturbance);
    CHECK(a.conclusive_rate == b.conclusive_rate);
  }
}
