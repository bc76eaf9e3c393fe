#pragma once

// Eavesdropping on BB84 and B92 with a copier: analytic error rates,
// seeded Monte Carlo, the classical bit-flip equivalent, and the
// consistency of the histories behind it.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qcopier/bloch.hpp"
#include "qcopier/circuits.hpp"
#include "qcopier/stochastic.hpp"

namespace qcopier {

/// Serial reference loop or OpenMP-parallel loop; results are identical.
enum class Exec { serial, parallel };

/// (1 - r_in . r_out) / 2 for a pure input.
double disturbance(const BlochVector& r_in, const COp& rho_out);

/// p: Alice -> Bob error rate, q: Alice -> Eve error rate.
struct ErrorRates {
  double p_x = 0.0, q_x = 0.0, p_y = 0.0, q_y = 0.0;
};

ErrorRates bb84_analytic_rates(double gamma, double delta);

/// Exact per-mode rates of any copier (bit-averaged).
struct ModeRates {
  double p = 0.0;
  double q = 0.0;
};
ModeRates analytic_mode_rates(const StochasticCopier& sc, Mode mode);

struct Bb84Config {
  double gamma = 0.0;
  double delta = 0.0;
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  std::vector<Mode> modes{Mode::x, Mode::y};
  bool keep_records = false;
};

struct TrialRecord {
  std::uint8_t mode = 0;    // index into Mode
  std::uint8_t bit = 0;     // Alice's bit
  std::uint8_t bob = 0;     // Bob's outcome
  std::uint8_t eve = 0;     // Eve's outcome
  std::uint8_t branch = 0;  // copier branch
};

/// Per mode and bit: trials, Bob errors, Eve errors.
struct ModeCounters {
  std::array<std::uint64_t, 2> sent{};
  std::array<std::uint64_t, 2> bob_errors{};
  std::array<std::uint64_t, 2> eve_errors{};

  std::uint64_t total_sent() const { return sent[0] + sent[1]; }
  double p() const;
  double q() const;
  double p_bit(int b) const;
  double q_bit(int b) const;
};

struct TrialLedger {
  std::vector<TrialRecord> records;  // empty unless keep_records
  std::array<ModeCounters, 3> counters{};  // indexed by Mode

  const ModeCounters& operator[](Mode m) const { return counters[static_cast<int>(m)]; }
};

struct Bb84Result {
  ErrorRates empirical;
  ErrorRates analytic;
  TrialLedger ledger;
};

Bb84Result simulate_bb84(const Bb84Config& cfg, Exec exec = Exec::parallel);
/// Same protocol with an arbitrary copier; cfg.gamma/delta are ignored
/// except for the analytic block, which then comes from the copier.
Bb84Result simulate_bb84(const Bb84Config& cfg, const StochasticCopier& sc,
                         Exec exec = Exec::parallel);

/// Classical pipeline: b = 0, copy a into b, flip a with probability p and
/// b with probability q.
struct ClassicalRates {
  double p = 0.0;
  double q = 0.0;
  std::uint64_t n = 0;
};
ClassicalRates classical_equivalent_bb84(double p, double q, std::uint64_t n, std::uint64_t seed,
                                         Exec exec = Exec::parallel);

/// Flip probabilities of the classical equivalent for one mode:
/// x: (sin^2(gamma'/2), sin^2(delta/2)), y: (sin^2(delta'/2), sin^2(gamma/2)).
ModeRates classical_flip_probabilities(const GammaDelta& gd, Mode mode);

/// Eight histories (initial bit, b flip, a flip) of the build_fig3 circuit.
struct ConsistencyReport {
  Eigen::Matrix<cplx, 8, 8> gram = Eigen::Matrix<cplx, 8, 8>::Zero();
  double max_offdiagonal = 0.0;
  std::array<double, 8> weights{};
  /// History h = 4*a0 + 2*b_flip + a_flip.
  static int index(int a0, int b_flip, int a_flip) { return 4 * a0 + 2 * b_flip + a_flip; }
};

ConsistencyReport consistency_check(const GammaDelta& gd_primed, Mode frame);

/// kappa0 = cos a |0_x> + sin a |1_x>, kappa1 = sin a |0_x> + cos a |1_x>,
/// a in (0, pi/4).
std::array<CVec, 2> b92_states(double alpha_bar);

enum class B92Machine { fig7, fig3a };

struct B92Config {
  double alpha_bar = kPi / 8;
  double delta = 0.0;
  std::optional<double> gamma_prime;  // nullopt: optimize
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  B92Machine machine = B92Machine::fig7;
};

struct B92Stats {
  double gamma_prime = 0.0;
  double eve_success = 0.0;
  /// Error frequency of Bob's measurement when his basis contains the sent state.
  double bob_disturbance = 0.0;
  double conclusive_rate = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t n_disturbance_trials = 0;
  /// Exact values from the output densities.
  double exact_disturbance = 0.0;
  double exact_eve_success = 0.0;
};

B92Stats simulate_b92(const B92Config& cfg, Exec exec = Exec::parallel);

/// Mean disturbance over the two signal states (exact, density level).
double b92_noise(double alpha_bar, double delta, double gamma_prime);

/// gamma' in [0, pi] minimizing b92_noise, to 1e-9.
double optimize_gamma_prime(double alpha_bar, double delta);

struct FuchsPeresParams {
  double phi = 0.0;
  double theta = 0.0;
};
/// phi = delta / 2, theta = gamma' / 2.
FuchsPeresParams fuchs_peres_param_map(double delta, double gamma_prime);

}  // namespace qcopier
