#include "qcopier/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace qcopier {

bool is_supported_dim(Eigen::Index dim) { return dim == 2 || dim == 4 || dim == 8; }

namespace {

void require_dim(Eigen::Index dim, const char* what) {
  if (!is_supported_dim(dim)) {
    throw DimensionError(std::string(what) + ": unsupported dimension " + std::to_string(dim));
  }
}

}  // namespace

CVec::CVec(Eigen::VectorXcd v) : v_(std::move(v)) { require_dim(v_.size(), "CVec"); }

CVec::CVec(std::initializer_list<cplx> entries) : v_(static_cast<Eigen::Index>(entries.size())) {
  Eigen::Index i = 0;
  for (const auto& e : entries) v_(i++) = e;
  require_dim(v_.size(), "CVec");
}

CVec CVec::basis(Eigen::Index dim, Eigen::Index index) {
  require_dim(dim, "CVec::basis");
  if (index < 0 || index >= dim) throw ValidationError("CVec::basis: index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(index) = 1.0;
  return CVec(std::move(v));
}

CVec CVec::normalized() const {
  const double n = v_.norm();
  if (n == 0.0) throw ValidationError("CVec::normalized: zero vector");
  return CVec(v_ / n);
}

bool CVec::is_normalized(double tol) const { return std::abs(v_.norm() - 1.0) <= tol; }

CVec CVec::operator+(const CVec& o) const {
  if (o.dim() != dim()) throw DimensionError("CVec::operator+: dimension mismatch");
  return CVec(v_ + o.v_);
}

CVec CVec::operator-(const CVec& o) const {
  if (o.dim() != dim()) throw DimensionError("CVec::operator-: dimension mismatch");
  return CVec(v_ - o.v_);
}

cplx inner(const CVec& a, const CVec& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner: dimension mismatch");
  return a.vec().dot(b.vec());  // Eigen's dot conjugates the first argument
}

COp::COp(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("COp: matrix is not square");
  require_dim(m_.rows(), "COp");
}

COp COp::identity(Eigen::Index dim) {
  require_dim(dim, "COp::identity");
  return COp(Eigen::MatrixXcd::Identity(dim, dim));
}

COp COp::zero(Eigen::Index dim) {
  require_dim(dim, "COp::zero");
  return COp(Eigen::MatrixXcd::Zero(dim, dim));
}

COp COp::projector(const CVec& psi) { return COp(psi.vec() * psi.vec().adjoint()); }

COp COp::outer(const CVec& ket, const CVec& bra) {
  if (ket.dim() != bra.dim()) throw DimensionError("COp::outer: dimension mismatch");
  return COp(ket.vec() * bra.vec().adjoint());
}

bool COp::is_unitary(double tol) const {
  const Eigen::MatrixXcd e = m_.adjoint() * m_ - Eigen::MatrixXcd::Identity(dim(), dim());
  return e.cwiseAbs().maxCoeff() <= tol;
}

bool COp::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool COp::is_density(double tol) const {
  if (!is_hermitian(tol)) return false;
  if (std::abs(m_.trace() - cplx(1.0, 0.0)) > tol) return false;
  const Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

COp COp::operator*(const COp& o) const {
  if (o.dim() != dim()) throw DimensionError("COp::operator*: dimension mismatch");
  return COp(m_ * o.m_);
}

CVec COp::operator*(const CVec& v) const {
  if (v.dim() != dim()) throw DimensionError("COp::operator*: dimension mismatch");
  return CVec(Eigen::VectorXcd(m_ * v.vec()));
}

COp COp::operator+(const COp& o) const {
  if (o.dim() != dim()) throw DimensionError("COp::operator+: dimension mismatch");
  return COp(m_ + o.m_);
}

COp COp::operator-(const COp& o) const {
  if (o.dim() != dim()) throw DimensionError("COp::operator-: dimension mismatch");
  return COp(m_ - o.m_);
}

double max_abs_diff(const COp& a, const COp& b) {
  if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
  return (a.mat() - b.mat()).cwiseAbs().maxCoeff();
}

namespace pauli {

COp x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return COp(m);
}

COp y() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return COp(m);
}

COp z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return COp(m);
}

}  // namespace pauli

namespace {

void require_tensor_dims(Eigen::Index da, Eigen::Index db) {
  const bool ok = (da == 2 && db == 2) || (da == 2 && db == 4) || (da == 4 && db == 2);
  if (!ok) {
    throw DimensionError("tensor: unsupported dimensions " + std::to_string(da) + " x " +
                         std::to_string(db));
  }
}

}  // namespace

COp tensor(const COp& a, const COp& b) {
  require_tensor_dims(a.dim(), b.dim());
  return COp(Eigen::MatrixXcd(Eigen::kroneckerProduct(a.mat(), b.mat())));
}

CVec tensor(const CVec& a, const CVec& b) {
  require_tensor_dims(a.dim(), b.dim());
  return CVec(Eigen::VectorXcd(Eigen::kroneckerProduct(a.vec(), b.vec())));
}

COp partial_trace(const COp& m, Qubit keep) {
  if (m.dim() != 4) throw DimensionError("partial_trace: expected a two-qubit operator");
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(2, 2);
  const auto& x = m.mat();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (keep == Qubit::a) {
          r(i, j) += x(2 * i + k, 2 * j + k);
        } else {
          r(i, j) += x(2 * k + i, 2 * k + j);
        }
      }
    }
  }
  return COp(std::move(r));
}

COp trace_out_leading(const COp& m) {
  if (m.dim() != 4 && m.dim() != 8) {
    throw DimensionError("trace_out_leading: expected dimension 4 or 8");
  }
  const Eigen::Index n = m.dim() / 2;
  const auto& x = m.mat();
  return COp(Eigen::MatrixXcd(x.topLeftCorner(n, n) + x.bottomRightCorner(n, n)));
}

Isometry::Isometry(CVec col0, CVec col1) : c0_(std::move(col0)), c1_(std::move(col1)) {
  if (c0_.dim() != 4 || c1_.dim() != 4) {
    throw DimensionError("Isometry: columns must be two-qubit vectors");
  }
  if (orthonormality_error() > kNormTol) {
    throw ValidationError("Isometry: columns are not orthonormal (error " +
                          std::to_string(orthonormality_error()) + ")");
  }
}

Isometry Isometry::from_matrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != 4 || m.cols() != 2) throw DimensionError("Isometry: expected a 4x2 matrix");
  return Isometry(CVec(Eigen::VectorXcd(m.col(0))), CVec(Eigen::VectorXcd(m.col(1))));
}

Eigen::MatrixXcd Isometry::matrix() const {
  Eigen::MatrixXcd m(4, 2);
  m.col(0) = c0_.vec();
  m.col(1) = c1_.vec();
  return m;
}

CVec Isometry::apply(const CVec& alpha) const {
  if (alpha.dim() != 2) throw DimensionError("Isometry::apply: input must be one qubit");
  return CVec(Eigen::VectorXcd(matrix() * alpha.vec()));
}

double Isometry::orthonormality_error() const {
  const Eigen::MatrixXcd m = matrix();
  return (m.adjoint() * m - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff();
}

Isometry isometry_from_unitary(const COp& u, const CVec& b) {
  if (u.dim() != 4) throw DimensionError("isometry_from_unitary: u must be two-qubit");
  if (b.dim() != 2) throw DimensionError("isometry_from_unitary: b must be one qubit");
  if (!u.is_unitary()) throw ValidationError("isometry_from_unitary: u is not unitary");
  if (!b.is_normalized()) throw ValidationError("isometry_from_unitary: b is not normalized");
  return Isometry(u * tensor(CVec::basis(2, 0), b), u * tensor(CVec::basis(2, 1), b));
}

ReducedOutputs apply_channel(const Isometry& v, const COp& rho_in) {
  if (rho_in.dim() != 2) throw DimensionError("apply_channel: input must be one qubit");
  if (!rho_in.is_density(1e-10)) throw ValidationError("apply_channel: input is not a density");
  const Eigen::MatrixXcd vm = v.matrix();
  const COp out(Eigen::MatrixXcd(vm * rho_in.mat() * vm.adjoint()));
  return {partial_trace(out, Qubit::a), partial_trace(out, Qubit::b)};
}

double phase_residual(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("phase_residual: shape mismatch");
  }
  Eigen::Index r = 0, c = 0;
  const double ymax = y.cwiseAbs().maxCoeff(&r, &c);
  if (ymax == 0.0) return x.cwiseAbs().maxCoeff();
  const cplx ratio = x(r, c) / y(r, c);
  const double mag = std::abs(ratio);
  const cplx phase = mag > 0.0 ? ratio / mag : cplx(1.0, 0.0);
  return (x - phase * y).cwiseAbs().maxCoeff();
}

bool equal_up_to_phase(const COp& x, const COp& y, double tol) {
  if (x.dim() != y.dim()) return false;
  return phase_residual(x.mat(), y.mat()) <= tol;
}

bool equal_up_to_phase(const Isometry& x, const Isometry& y, double tol) {
  return phase_residual(x.matrix(), y.matrix()) <= tol;
}

bool equal_up_to_phase(const CVec& x, const CVec& y, double tol) {
  if (x.dim() != y.dim()) return false;
  return phase_residual(x.vec(), y.vec()) <= tol;
}

COp random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  if (!is_supported_dim(dim)) throw DimensionError("random_unitary: unsupported dimension");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : cplx(1.0, 0.0);
  }
  return COp(std::move(q));
}

CVec random_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return CVec(std::move(v)).normalized();
}

COp random_density(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = unit(rng);
  return COp::projector(random_state(2, rng)) * w + COp::identity(2) * ((1.0 - w) / 2.0);
}

}  // namespace qcopier
