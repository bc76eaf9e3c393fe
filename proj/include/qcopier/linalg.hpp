#pragma once

// Dense complex linear algebra for one, two and three qubits.
//
// Every object here has dimension 2, 4 or 8.  Basis ordering for two qubits
// is index = 2*(a bit) + (b bit), i.e. the a qubit is the leftmost tensor
// factor.  For three qubits the extra (coin) qubit is the most significant
// index.

#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace qcopier {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerances shared by all modules.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kDensityTol = 1e-12;

/// Thrown on an operand of the wrong or an unsupported dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_supported_dim(Eigen::Index dim);

/// A state vector of dimension 2, 4 or 8.
class CVec {
 public:
  CVec() : v_(Eigen::VectorXcd::Zero(2)) {}
  explicit CVec(Eigen::VectorXcd v);
  CVec(std::initializer_list<cplx> entries);

  static CVec basis(Eigen::Index dim, Eigen::Index index);

  Eigen::Index dim() const { return v_.size(); }
  const Eigen::VectorXcd& vec() const { return v_; }
  cplx operator[](Eigen::Index i) const { return v_(i); }

  double norm() const { return v_.norm(); }
  CVec normalized() const;
  bool is_normalized(double tol = kNormTol) const;

  CVec operator*(cplx s) const { return CVec(v_ * s); }
  CVec operator+(const CVec& o) const;
  CVec operator-(const CVec& o) const;

 private:
  Eigen::VectorXcd v_;
};

/// <a|b>
cplx inner(const CVec& a, const CVec& b);

/// A square operator of dimension 2, 4 or 8.
class COp {
 public:
  COp() : m_(Eigen::MatrixXcd::Identity(2, 2)) {}
  explicit COp(Eigen::MatrixXcd m);

  static COp identity(Eigen::Index dim);
  static COp zero(Eigen::Index dim);
  /// |psi><psi|
  static COp projector(const CVec& psi);
  /// |ket><bra|
  static COp outer(const CVec& ket, const CVec& bra);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXcd& mat() const { return m_; }
  cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  COp adjoint() const { return COp(m_.adjoint()); }
  cplx trace() const { return m_.trace(); }

  bool is_unitary(double tol = kUnitaryTol) const;
  bool is_hermitian(double tol = kDensityTol) const;
  /// Hermitian, positive semidefinite and unit trace.
  bool is_density(double tol = kDensityTol) const;

  COp operator*(const COp& o) const;
  CVec operator*(const CVec& v) const;
  COp operator*(cplx s) const { return COp(m_ * s); }
  COp operator+(const COp& o) const;
  COp operator-(const COp& o) const;

 private:
  Eigen::MatrixXcd m_;
};

/// Largest entry magnitude of a - b.
double max_abs_diff(const COp& a, const COp& b);

namespace pauli {
COp x();
COp y();
COp z();
}  // namespace pauli

/// Kronecker product with the left operand as the more significant factor.
/// Supported: 2x2 -> 4, 2x4 -> 8, 4x2 -> 8.
COp tensor(const COp& a, const COp& b);
CVec tensor(const CVec& a, const CVec& b);

enum class Qubit { a, b };

/// Reduced operator on one qubit of a two-qubit operator.
/// keep = a gives Tr_B[m], keep = b gives Tr_A[m].
COp partial_trace(const COp& m, Qubit keep);

/// Traces out the most significant qubit: dim 8 -> 4 or dim 4 -> 2.
COp trace_out_leading(const COp& m);

/// Norm-preserving map from the one-qubit input space into two qubits.
/// Column j is the image of |j>.
class Isometry {
 public:
  Isometry(CVec col0, CVec col1);
  /// From a 4x2 matrix.
  static Isometry from_matrix(const Eigen::MatrixXcd& m);

  const CVec& column(int j) const { return j == 0 ? c0_ : c1_; }
  /// 4x2 matrix [col0 col1].
  Eigen::MatrixXcd matrix() const;
  CVec apply(const CVec& alpha) const;

  /// Largest entry of |V^dagger V - I|.
  double orthonormality_error() const;

 private:
  CVec c0_, c1_;
};

/// V|alpha> = U(|alpha> (x) |b>).
Isometry isometry_from_unitary(const COp& u, const CVec& b);

struct ReducedOutputs {
  COp rho_a;
  COp rho_b;
};

/// Reduced densities of V rho_in V^dagger.
ReducedOutputs apply_channel(const Isometry& v, const COp& rho_in);

/// True iff some unit complex c gives max|x - c y| <= tol.  The phase c is
/// taken from the largest-magnitude entry of y.
bool equal_up_to_phase(const COp& x, const COp& y, double tol);
bool equal_up_to_phase(const Isometry& x, const Isometry& y, double tol);
bool equal_up_to_phase(const CVec& x, const CVec& y, double tol);

/// Smallest max-entry distance min_c |x - c y| with c fixed by the pivot rule.
double phase_residual(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y);

/// Haar-random unitary: complex Gaussian matrix, QR, diagonal phases fixed.
COp random_unitary(Eigen::Index dim, std::mt19937_64& rng);
/// Haar-random pure state.
CVec random_state(Eigen::Index dim, std::mt19937_64& rng);
/// Random density matrix: mixture of a random pure state with the identity.
COp random_density(std::mt19937_64& rng);

}  // namespace qcopier
