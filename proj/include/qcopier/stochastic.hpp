#pragma once

// Copiers that pick one of several isometries at random, and the unitary
// replacement driven by a quantum coin.

#include <vector>

#include "qcopier/bloch.hpp"
#include "qcopier/circuits.hpp"
#include "qcopier/linalg.hpp"
#include "qcopier/rng.hpp"

namespace qcopier {

struct CopierBranch {
  double p = 1.0;
  Isometry v;
};

class StochasticCopier {
 public:
  /// Probabilities must be non-negative and sum to 1 within 1e-12.
  explicit StochasticCopier(std::vector<CopierBranch> branches);
  static StochasticCopier single(const Isometry& v);

  const std::vector<CopierBranch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }

 private:
  std::vector<CopierBranch> branches_;
};

/// Sum_i p_i (M_i, d_i).
AffineChannel averaged_channel(const StochasticCopier& sc, Qubit out);

/// p-weighted mixture of the reduced output densities.
ReducedOutputs mixed_output(const StochasticCopier& sc, const COp& rho_in);

/// Branch 0: V_c(gamma0, delta0).  Branch 1: (I (x) R(pi)) V_c(gamma0, pi - delta0).
StochasticCopier centered_copier(const GammaDelta& gd0, double p0);

/// Branches given as full unitaries sharing one |b>.
struct UnitaryBranches {
  std::vector<double> p;
  std::vector<COp> u;
  CVec b_init = CVec::basis(2, 0);

  StochasticCopier copier() const;
};

/// The centered copier built from build_fig2a circuits.
UnitaryBranches centered_unitary_branches(const GammaDelta& gd0, double p0);

struct CoinEmbedding {
  COp u8 = COp::identity(8);
  CVec coin_state = CVec::basis(2, 0);
  CVec b_init = CVec::basis(2, 0);
};

/// u8 = |0_c><0_c| (x) u0 + |1_c><1_c| (x) u1, coin (sqrt p0, sqrt p1).
/// Throws unless there are exactly two branches.
CoinEmbedding coin_embedding(const UnitaryBranches& ub);

/// Reduced channel on one output after evolving |alpha>|b>|coin> and
/// tracing out the coin.
AffineChannel embedded_channel(const CoinEmbedding& ce, Qubit out);

/// Index i with probability p_i.
std::size_t sample_branch(const StochasticCopier& sc, CounterRng& rng);

}  // namespace qcopier
