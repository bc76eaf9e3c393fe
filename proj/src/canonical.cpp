#include "qcopier/canonical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <variant>

namespace qcopier {

namespace {

constexpr double kEigenGapTol = 1e-8;       // partial-trace path needs separated spectra
constexpr double kContinuumTol = 1e-10;     // quadratic form identically zero
constexpr double kCoalesceTol = 1e-10;      // |discriminant| / |leading|^2
constexpr double kProbeTol = 1e-12;         // coefficient treated as vanishing
constexpr double kResidualTarget = 1e-10;   // accept a construction without trying the other

const cplx kI(0.0, 1.0);

COp diag2(cplx d0, cplx d1) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = d0;
  m(1, 1) = d1;
  return COp(std::move(m));
}

COp from_columns(const CVec& c0, const CVec& c1) {
  Eigen::MatrixXcd m(2, 2);
  m.col(0) = c0.vec();
  m.col(1) = c1.vec();
  return COp(std::move(m));
}

/// Unit vector orthogonal to a one-qubit state.
CVec perp(const CVec& v) { return CVec{-std::conj(v[1]), std::conj(v[0])}; }

/// The unit vector orthogonal to v0 with the phase of v1 (v1 nearly orthogonal to v0).
CVec orthogonal_partner(const CVec& v0, const CVec& v1) {
  const CVec p = perp(v0);
  const cplx o = inner(p, v1);
  return std::abs(o) > 0.0 ? p * (o / std::abs(o)) : p;
}

/// Nearest unitary (polar factor) of a 2x2 matrix.
COp nearest_unitary(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return COp(Eigen::MatrixXcd(svd.matrixU() * svd.matrixV().adjoint()));
}

Eigen::Matrix2cd coefficients(const CVec& psi) {
  Eigen::Matrix2cd t;
  t << psi[0], psi[1], psi[2], psi[3];
  return t;
}

cplx det2(const Eigen::Matrix2cd& t) { return t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0); }

/// Mixed term of det(x t1 + y t2) = A x^2 + B x y + C y^2.
cplx mixed_det(const Eigen::Matrix2cd& t1, const Eigen::Matrix2cd& t2) {
  return t1(0, 0) * t2(1, 1) + t2(0, 0) * t1(1, 1) - t1(0, 1) * t2(1, 0) - t2(0, 1) * t1(1, 0);
}

/// Factors of a vector assumed to be (close to) a product.
ProductState product_factors(const CVec& psi) {
  const Eigen::Matrix2cd t = coefficients(psi);
  Eigen::Index r = 0, c = 0;
  t.cwiseAbs().maxCoeff(&r, &c);
  const CVec alpha = CVec(Eigen::VectorXcd(t.col(c))).normalized();
  Eigen::VectorXcd beta = t.transpose() * alpha.vec().conjugate();
  return {alpha, CVec(std::move(beta))};
}

struct Spectrum {
  Eigen::Vector2d values;  // descending
  std::array<CVec, 2> vectors;
};

Spectrum spectrum(const COp& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.mat());
  Spectrum s;
  s.values << es.eigenvalues()(1), es.eigenvalues()(0);
  s.vectors[0] = CVec(Eigen::VectorXcd(es.eigenvectors().col(1)));
  s.vectors[1] = CVec(Eigen::VectorXcd(es.eigenvectors().col(0)));
  return s;
}

// Normalization steps: the four symmetry generators plus whole turns of
// one angle, which only change the sign of one column of V_c.
struct Wrap {
  bool zeta = true;
  long turns = 0;
};
using Step = std::variant<SymmetryOp, Wrap>;

CanonicalParams step_params(const CanonicalParams& p, const Step& s) {
  if (const auto* w = std::get_if<Wrap>(&s)) {
    const double shift = 2.0 * kPi * static_cast<double>(w->turns);
    return w->zeta ? CanonicalParams{p.zeta - shift, p.eta} : CanonicalParams{p.zeta, p.eta - shift};
  }
  switch (std::get<SymmetryOp>(s)) {
    case SymmetryOp::negate_zeta:
      return {-p.zeta, p.eta};
    case SymmetryOp::negate_eta:
      return {p.zeta, -p.eta};
    case SymmetryOp::shift_both_by_pi:
      return {p.zeta + kPi, p.eta + kPi};
    case SymmetryOp::swap:
      return {p.eta, p.zeta};
  }
  return p;
}

LocalEquivalence step_unitaries(const Step& s) {
  if (const auto* w = std::get_if<Wrap>(&s)) {
    const double sign = (w->turns % 2 == 0) ? 1.0 : -1.0;
    const COp id = COp::identity(2);
    return {id, id, w->zeta ? diag2(sign, 1.0) : diag2(1.0, sign)};
  }
  return symmetry_unitaries(std::get<SymmetryOp>(s));
}

CanonicalDecomposition apply_step(const CanonicalDecomposition& d, const Step& s) {
  const LocalEquivalence l = step_unitaries(s);
  return {step_params(d.params, s), l.l_o * d.s_o, d.s_a * l.l_a, d.s_b * l.l_b};
}

/// Reduces an angle to (-pi, pi] and reports the whole turns removed.
std::pair<double, long> wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  const long turns = std::lround((x - r) / (2.0 * kPi));
  return {r, turns};
}

std::vector<Step> normalize_steps(double zeta, double eta) {
  std::vector<Step> steps;
  CanonicalParams p{zeta, eta};
  auto push = [&](Step s) {
    p = step_params(p, s);
    steps.push_back(s);
  };
  auto wrap_both = [&]() {
    const auto [zr, zt] = wrap_angle(p.zeta);
    if (zt != 0) push(Wrap{true, zt});
    const auto [er, et] = wrap_angle(p.eta);
    if (et != 0) push(Wrap{false, et});
  };

  wrap_both();
  if (p.zeta < 0.0) push(SymmetryOp::negate_zeta);
  if (p.eta < 0.0) push(SymmetryOp::negate_eta);
  if (p.zeta + p.eta > kPi) {
    push(SymmetryOp::shift_both_by_pi);
    wrap_both();
    if (p.zeta < 0.0) push(SymmetryOp::negate_zeta);
    if (p.eta < 0.0) push(SymmetryOp::negate_eta);
  }
  if (p.zeta > p.eta) push(SymmetryOp::swap);
  return steps;
}

CanonicalDecomposition normalize_decomposition(CanonicalDecomposition d) {
  for (const Step& s : normalize_steps(d.params.zeta, d.params.eta)) d = apply_step(d, s);
  return d;
}

/// Given orthonormal bases {a0,a1}, {b0,b1} in which the subspace has the
/// paired structure g0 in span{a0b0, a1b1}, g1 in span{a0b1, a1b0}, fixes
/// the relative phases of a1 and b1 and reads off the coefficients.
CanonicalDecomposition fit_in_bases(const Isometry& v, const Subspace2of4& g, const CVec& a0,
                                    CVec a1, const CVec& b0, CVec b1) {
  a1 = orthogonal_partner(a0, a1);
  b1 = orthogonal_partner(b0, b1);
  const COp& proj = g.projector();
  const double mu = (proj * tensor(a0, b0)).norm();
  const double mu_bar = (proj * tensor(a1, b1)).norm();
  const double nu = (proj * tensor(a0, b1)).norm();
  const double nu_bar = (proj * tensor(a1, b0)).norm();

  // Relative phases from probe inner products.  Of the two orthonormal
  // probes, one always overlaps each canonical vector by at least 1/sqrt(2).
  auto pick_phase = [&](const CVec& x, const CVec& y) {
    double best = -1.0;
    double phase = 0.0;
    for (int j = 0; j < 2; ++j) {
      const cplx px = inner(g.basis(j), x);
      const cplx py = inner(g.basis(j), y);
      const double m = std::min(std::abs(px), std::abs(py));
      if (m > best) {
        best = m;
        phase = std::arg(px) - std::arg(py);
      }
    }
    return best > kProbeTol ? phase : 0.0;
  };
  const double s = pick_phase(tensor(a0, b0), tensor(a1, b1));  // alpha + beta
  const double t = pick_phase(tensor(a0, b1), tensor(a1, b0));  // alpha - beta
  a1 = a1 * std::polar(1.0, 0.5 * (s + t));
  b1 = b1 * std::polar(1.0, 0.5 * (s - t));

  CanonicalDecomposition d;
  d.params = {2.0 * std::atan2(mu_bar, mu), 2.0 * std::atan2(nu_bar, nu)};
  d.s_a = from_columns(a0, a1);
  d.s_b = from_columns(b0, b1);

  // S_o |a'_j> = |j> with a'_j = V^dagger g_j.
  const Isometry vc = canonical_isometry(d.params);
  const COp sab = tensor(d.s_a, d.s_b);
  const Eigen::MatrixXcd vm = v.matrix();
  Eigen::MatrixXcd so(2, 2);
  for (int j = 0; j < 2; ++j) {
    const CVec gj = sab * vc.column(j);
    so.row(j) = (vm.adjoint() * gj.vec()).adjoint();
  }
  d.s_o = nearest_unitary(so);
  return d;
}

std::optional<CanonicalDecomposition> via_partial_traces(const Isometry& v, const Subspace2of4& g,
                                                         const Spectrum& sa, const Spectrum& sb) {
  if (sa.values(0) - sa.values(1) <= kEigenGapTol || sb.values(0) - sb.values(1) <= kEigenGapTol) {
    return std::nullopt;
  }
  // |a0><a0| takes the larger eigenvalue, likewise for b.
  return fit_in_bases(v, g, sa.vectors[0], sa.vectors[1], sb.vectors[0], sb.vectors[1]);
}

CanonicalDecomposition via_continuum(const Isometry& v, const Spectrum& sa, const Spectrum& sb) {
  const Eigen::MatrixXcd vm = v.matrix();
  CanonicalDecomposition d;
  d.s_o = COp::identity(2);
  if (sa.values(0) >= sb.values(0)) {
    // Every image is |alpha> (x) |b_j>.
    const CVec alpha = sa.vectors[0];
    std::array<CVec, 2> b;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXcd bj(2);
      for (int k = 0; k < 2; ++k) {
        bj(k) = std::conj(alpha[0]) * vm(k, j) + std::conj(alpha[1]) * vm(2 + k, j);
      }
      b[j] = CVec(std::move(bj));
    }
    d.params = {0.0, 0.0};
    d.s_a = from_columns(alpha, perp(alpha));
    d.s_b = nearest_unitary(from_columns(b[0], b[1]).mat());
  } else {
    // Every image is |a_j> (x) |beta>.
    const CVec beta = sb.vectors[0];
    std::array<CVec, 2> a;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXcd aj(2);
      for (int i = 0; i < 2; ++i) {
        aj(i) = std::conj(beta[0]) * vm(2 * i, j) + std::conj(beta[1]) * vm(2 * i + 1, j);
      }
      a[j] = CVec(std::move(aj));
    }
    d.params = {0.0, kPi};
    d.s_a = nearest_unitary(from_columns(a[0], a[1]).mat());
    d.s_b = from_columns(beta, perp(beta));
  }
  return d;
}

std::optional<CanonicalDecomposition> via_product_states(const Isometry& v,
                                                         const Subspace2of4& g) {
  const ProductStateList list = find_product_states(g);
  if (list.continuum) return std::nullopt;
  if (list.entries.size() == 1) {
    // The product vector itself is g0 and mu_bar = 0.
    const ProductState& p = list.entries[0];
    return fit_in_bases(v, g, p.alpha, perp(p.alpha), p.beta.normalized(),
                        perp(p.beta.normalized()));
  }
  const ProductState& p0 = list.entries[0];
  const ProductState& p1 = list.entries[1];
  const CVec b0n = p0.beta.normalized();
  const CVec b1n = p1.beta.normalized();
  const CVec a_plus = (p0.alpha + p1.alpha).normalized();
  const CVec a_minus = (p0.alpha - p1.alpha).normalized();
  const CVec b_plus = (b0n + b1n).normalized();
  const CVec b_minus = (b0n - b1n).normalized();
  return fit_in_bases(v, g, a_plus, a_minus, b_plus, b_minus);
}

}  // namespace

Subspace2of4::Subspace2of4(const CVec& v0, const CVec& v1) {
  if (v0.dim() != 4 || v1.dim() != 4) throw DimensionError("Subspace2of4: expected two-qubit vectors");
  if (v0.norm() < kNormTol) throw ValidationError("Subspace2of4: zero spanning vector");
  g0_ = v0.normalized();
  const CVec rest = v1 - g0_ * inner(g0_, v1);
  if (rest.norm() < 1e-10 * std::max(1.0, v1.norm())) {
    throw ValidationError("Subspace2of4: spanning vectors are linearly dependent");
  }
  g1_ = rest.normalized();
  projector_ = COp::projector(g0_) + COp::projector(g1_);
}

Subspace2of4::Subspace2of4(const Isometry& v) : Subspace2of4(v.column(0), v.column(1)) {}

bool CanonicalParams::in_fundamental_region(double tol) const {
  return zeta >= -tol && zeta <= eta + tol && zeta + eta <= kPi + tol;
}

std::optional<ProductState> is_product(const CVec& psi, double tol) {
  if (psi.dim() != 4) throw DimensionError("is_product: expected a two-qubit vector");
  if (std::abs(det2(coefficients(psi))) > tol) return std::nullopt;
  ProductState p = product_factors(psi);
  p.beta = p.beta.normalized();
  return p;
}

ProductStateList find_product_states(const Subspace2of4& g) {
  const Eigen::Matrix2cd t0 = coefficients(g.basis(0));
  const Eigen::Matrix2cd t1 = coefficients(g.basis(1));
  const cplx qa = det2(t0);
  const cplx qb = mixed_det(t0, t1);
  const cplx qc = det2(t1);

  ProductStateList out;
  if (std::max({std::abs(qa), std::abs(qb), std::abs(qc)}) < kContinuumTol) {
    out.continuum = true;
    return out;
  }

  // A member psi' of the subspace that is far from being a product.
  const double r = 1.0 / std::sqrt(2.0);
  const std::array<std::pair<cplx, cplx>, 6> candidates{{{1.0, 0.0},
                                                          {0.0, 1.0},
                                                          {r, r},
                                                          {r, -r},
                                                          {r, r * kI},
                                                          {r, -r * kI}}};
  std::pair<cplx, cplx> best = candidates[0];
  double best_det = -1.0;
  for (const auto& [x, y] : candidates) {
    const double d = std::abs(qa * x * x + qb * x * y + qc * y * y);
    if (d > best_det) {
      best_det = d;
      best = {x, y};
    }
  }
  const auto [x0, y0] = best;
  const CVec psi1 = g.basis(0) * x0 + g.basis(1) * y0;
  const CVec psi2 = g.basis(0) * (-std::conj(y0)) + g.basis(1) * std::conj(x0);

  // det(lambda psi1 + psi2) = A lambda^2 + B lambda + C.
  const Eigen::Matrix2cd u1 = coefficients(psi1);
  const Eigen::Matrix2cd u2 = coefficients(psi2);
  const cplx a = det2(u1);
  const cplx b = mixed_det(u1, u2);
  const cplx c = det2(u2);
  const cplx disc = b * b - 4.0 * a * c;

  std::vector<cplx> roots;
  if (std::abs(disc) <= kCoalesceTol * std::norm(a)) {
    roots.push_back(-b / (2.0 * a));
  } else {
    cplx sq = std::sqrt(disc);
    if (std::real(std::conj(b) * sq) < 0.0) sq = -sq;
    const cplx q = -0.5 * (b + sq);
    roots.push_back(q / a);
    roots.push_back(c / q);
    // Larger |lambda| first.
    if (std::abs(roots[1]) > std::abs(roots[0])) std::swap(roots[0], roots[1]);
  }

  for (const cplx lambda : roots) {
    const CVec psi = (psi1 * lambda + psi2).normalized();
    ProductState p = product_factors(psi);
    p.beta = p.beta.normalized();
    out.entries.push_back(std::move(p));
  }
  if (out.entries.size() == 2) {
    // 0 <= <alpha0|alpha1>, 0 <= <beta0|beta1>.
    ProductState& p1 = out.entries[1];
    const cplx oa = inner(out.entries[0].alpha, p1.alpha);
    const cplx ob = inner(out.entries[0].beta, p1.beta);
    if (std::abs(oa) > 0.0) p1.alpha = p1.alpha * (std::conj(oa) / std::abs(oa));
    if (std::abs(ob) > 0.0) p1.beta = p1.beta * (std::conj(ob) / std::abs(ob));
  }
  return out;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> reduced_projector_spectra(const Subspace2of4& g) {
  return {spectrum(partial_trace(g.projector(), Qubit::a)).values,
          spectrum(partial_trace(g.projector(), Qubit::b)).values};
}

CanonicalizeDetail canonicalize_detailed(const Isometry& v) {
  const Subspace2of4 g(v);
  const Spectrum sa = spectrum(partial_trace(g.projector(), Qubit::a));
  const Spectrum sb = spectrum(partial_trace(g.projector(), Qubit::b));

  CanonicalizeDetail best;
  best.residual = std::numeric_limits<double>::infinity();
  auto consider = [&](std::optional<CanonicalDecomposition> d, CanonicalMethod m) {
    if (!d) return;
    CanonicalDecomposition n = normalize_decomposition(std::move(*d));
    const double res = phase_residual(reconstruct(n).matrix(), v.matrix());
    if (res < best.residual) best = {std::move(n), m, res};
  };

  consider(via_partial_traces(v, g, sa, sb), CanonicalMethod::partial_trace);
  if (best.residual > kResidualTarget) {
    consider(via_product_states(v, g), CanonicalMethod::product_states);
  }
  if (best.residual > kResidualTarget) {
    consider(via_continuum(v, sa, sb), CanonicalMethod::continuum);
  }
  return best;
}

CanonicalDecomposition canonicalize(const Isometry& v) {
  return canonicalize_detailed(v).decomposition;
}

Isometry canonical_isometry(const CanonicalParams& p) {
  const double cz = std::cos(0.5 * p.zeta), sz = std::sin(0.5 * p.zeta);
  const double ce = std::cos(0.5 * p.eta), se = std::sin(0.5 * p.eta);
  return Isometry(CVec{cz, 0.0, 0.0, sz}, CVec{0.0, ce, se, 0.0});
}

Isometry reconstruct(const CanonicalDecomposition& d) {
  const Eigen::MatrixXcd m =
      tensor(d.s_a, d.s_b).mat() * canonical_isometry(d.params).matrix() * d.s_o.mat();
  return Isometry::from_matrix(m);
}

std::string_view to_string(SymmetryOp op) {
  switch (op) {
    case SymmetryOp::negate_zeta:
      return "negate-zeta";
    case SymmetryOp::negate_eta:
      return "negate-eta";
    case SymmetryOp::shift_both_by_pi:
      return "shift-both-by-pi";
    case SymmetryOp::swap:
      return "swap";
  }
  return "unknown";
}

NormalizedParams normalize_params(double zeta, double eta) {
  NormalizedParams out;
  CanonicalParams p{zeta, eta};
  for (const Step& s : normalize_steps(zeta, eta)) {
    p = step_params(p, s);
    if (const auto* op = std::get_if<SymmetryOp>(&s)) out.applied_ops.push_back(*op);
  }
  out.params = p;
  return out;
}

LocalEquivalence symmetry_unitaries(SymmetryOp op) {
  const COp id = COp::identity(2);
  switch (op) {
    case SymmetryOp::negate_zeta:
      return {diag2(1.0, kI), diag2(1.0, kI), diag2(1.0, -kI)};
    case SymmetryOp::negate_eta:
      return {diag2(1.0, kI), diag2(1.0, -kI), diag2(1.0, kI)};
    case SymmetryOp::shift_both_by_pi:
      return {pauli::z() * pauli::x(), pauli::x(), id};
    case SymmetryOp::swap:
      return {id, pauli::x(), pauli::x()};
  }
  return {id, id, id};
}

CanonicalDecomposition apply_symmetry(const CanonicalDecomposition& d, SymmetryOp op) {
  return apply_step(d, Step{op});
}

}  // namespace qcopier
