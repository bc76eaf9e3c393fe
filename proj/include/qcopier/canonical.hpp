#pragma once

// Canonical basis of a two-dimensional subspace of two qubits and the
// factorization V = (S_a (x) S_b) V_c S_o of a qubit-to-two-qubit isometry.
//
// The canonical isometry V_c(zeta, eta) maps
//   |0> -> cos(zeta/2)|00> + sin(zeta/2)|11>
//   |1> -> cos(eta/2)|01>  + sin(eta/2)|10>
// and the fundamental region is 0 <= zeta <= eta, zeta + eta <= pi.

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "qcopier/linalg.hpp"

namespace qcopier {

/// A two-dimensional subspace of the two-qubit space.
class Subspace2of4 {
 public:
  /// Gram-Schmidt cleans the spanning pair; throws if it is degenerate.
  Subspace2of4(const CVec& v0, const CVec& v1);
  /// The image of an isometry.
  explicit Subspace2of4(const Isometry& v);

  const CVec& basis(int j) const { return j == 0 ? g0_ : g1_; }
  const COp& projector() const { return projector_; }

 private:
  CVec g0_, g1_;
  COp projector_;
};

struct CanonicalParams {
  double zeta = 0.0;
  double eta = 0.0;

  bool in_fundamental_region(double tol = 1e-12) const;
};

struct CanonicalDecomposition {
  CanonicalParams params;
  COp s_o;
  COp s_a;
  COp s_b;
};

struct ProductState {
  CVec alpha;  // factor on a
  CVec beta;   // factor on b

  CVec state() const { return tensor(alpha, beta); }
};

/// Product vectors found in a subspace.  `continuum` means every member is a
/// product vector; `entries` is then empty.
struct ProductStateList {
  std::vector<ProductState> entries;
  bool continuum = false;
};

/// Factors of psi if tau00*tau11 - tau01*tau10 vanishes to within tol.
/// The returned factors are normalized and their tensor product equals psi.
std::optional<ProductState> is_product(const CVec& psi, double tol);

/// Product vectors of a subspace: two in general, one when the two roots of
/// the product condition coincide, or the continuum flag.  Entries carry the
/// phase convention 0 <= <alpha0|alpha1>, 0 <= <beta0|beta1>.
ProductStateList find_product_states(const Subspace2of4& g);

/// Factors v as (S_a (x) S_b) V_c S_o with params in the fundamental region.
CanonicalDecomposition canonicalize(const Isometry& v);

/// Which construction produced a decomposition.
enum class CanonicalMethod { partial_trace, product_states, continuum };

struct CanonicalizeDetail {
  CanonicalDecomposition decomposition;
  CanonicalMethod method = CanonicalMethod::partial_trace;
  double residual = 0.0;
};

CanonicalizeDetail canonicalize_detailed(const Isometry& v);

Isometry canonical_isometry(const CanonicalParams& p);

/// (S_a (x) S_b) V_c S_o.
Isometry reconstruct(const CanonicalDecomposition& d);

/// Generators of the equivalences between coefficient sets.
enum class SymmetryOp { negate_zeta, negate_eta, shift_both_by_pi, swap };

std::string_view to_string(SymmetryOp op);

struct NormalizedParams {
  CanonicalParams params;
  std::vector<SymmetryOp> applied_ops;
};

/// Maps any (zeta, eta) into the fundamental region.
NormalizedParams normalize_params(double zeta, double eta);

/// One-qubit unitaries (l_a, l_b, l_o) with
///   V_c(zeta, eta) = (l_a (x) l_b) V_c(op(zeta, eta)) l_o
/// for every (zeta, eta).
struct LocalEquivalence {
  COp l_a;
  COp l_b;
  COp l_o;
};

LocalEquivalence symmetry_unitaries(SymmetryOp op);

/// Applies op to the parameters of d while keeping reconstruct(d) fixed.
CanonicalDecomposition apply_symmetry(const CanonicalDecomposition& d, SymmetryOp op);

/// Eigenvalues (descending) of Tr_B and Tr_A of the subspace projector.
std::pair<Eigen::Vector2d, Eigen::Vector2d> reduced_projector_spectra(const Subspace2of4& g);

}  // namespace qcopier
