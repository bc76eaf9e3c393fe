#include "qcopier/bloch.hpp"

#include <algorithm>
#include <cmath>

namespace qcopier {

namespace {

constexpr double kBallTol = 1e-10;

const std::array<COp, 3>& paulis() {
  static const std::array<COp, 3> s{pauli::x(), pauli::y(), pauli::z()};
  return s;
}

double sq_norm_image(const AffineChannel& ch, const Eigen::Vector3d& u) {
  return (ch.m * u + ch.d).squaredNorm();
}

/// Local maximization of |M u + d|^2 on the unit sphere: Riemannian Newton
/// with a gradient-ascent fallback whenever Newton does not improve.
Eigen::Vector3d refine(const AffineChannel& ch, Eigen::Vector3d u, int steps) {
  const Eigen::Matrix3d h = 2.0 * ch.m.transpose() * ch.m;
  double f = sq_norm_image(ch, u);
  for (int it = 0; it < steps; ++it) {
    const Eigen::Vector3d g = 2.0 * ch.m.transpose() * (ch.m * u + ch.d);
    const Eigen::Matrix3d p = Eigen::Matrix3d::Identity() - u * u.transpose();
    const Eigen::Vector3d rg = p * g;
    if (rg.norm() < 1e-15) break;

    // tangent basis
    Eigen::Vector3d t1 = rg.normalized();
    Eigen::Vector3d t2 = u.cross(t1);
    Eigen::Matrix<double, 3, 2> tb;
    tb << t1, t2;
    const Eigen::Matrix2d rh =
        tb.transpose() * h * tb - (u.dot(g)) * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d rgt = tb.transpose() * g;

    bool moved = false;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rh);
    if (es.eigenvalues().maxCoeff() < 0.0) {
      const Eigen::Vector2d xi = -rh.ldlt().solve(rgt);
      const Eigen::Vector3d cand = (u + tb * xi).normalized();
      const double fc = sq_norm_image(ch, cand);
      if (fc >= f) {
        u = cand;
        f = fc;
        moved = true;
      }
    }
    if (!moved) {
      double step = 1.0 / std::max(1.0, h.norm());
      for (int k = 0; k < 40; ++k, step *= 0.5) {
        const Eigen::Vector3d cand = (u + step * rg).normalized();
        const double fc = sq_norm_image(ch, cand);
        if (fc > f) {
          u = cand;
          f = fc;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
  }
  return u;
}

}  // namespace

BlochVector density_to_bloch(const COp& rho) {
  if (rho.dim() != 2) throw DimensionError("density_to_bloch: expected a one-qubit operator");
  if (!rho.is_density(kBallTol)) throw ValidationError("density_to_bloch: not a density matrix");
  BlochVector b;
  for (int j = 0; j < 3; ++j) b.r(j) = (rho * paulis()[j]).trace().real();
  return b;
}

COp bloch_to_density(const BlochVector& b) {
  if (b.norm() > 1.0 + kBallTol) throw ValidationError("bloch_to_density: |r| exceeds 1");
  COp rho = COp::identity(2) * 0.5;
  for (int j = 0; j < 3; ++j) rho = rho + paulis()[j] * (0.5 * b.r(j));
  return rho;
}

GammaDelta GammaDelta::from_params(const CanonicalParams& p) {
  return {0.5 * (p.eta + p.zeta), 0.5 * (p.eta - p.zeta)};
}

AffineChannel channel_of_map(const std::function<COp(const COp&)>& map) {
  auto image = [&](const COp& rho_in) { return density_to_bloch(map(rho_in)).r; };
  AffineChannel ch;
  ch.d = image(COp::identity(2) * 0.5);
  for (int j = 0; j < 3; ++j) {
    BlochVector axis;
    axis.r(j) = 1.0;
    ch.m.col(j) = image(bloch_to_density(axis)) - ch.d;
  }
  return ch;
}

AffineChannel channel_of_isometry(const Isometry& v, Qubit out) {
  return channel_of_map([&](const COp& rho_in) {
    const ReducedOutputs o = apply_channel(v, rho_in);
    return out == Qubit::a ? o.rho_a : o.rho_b;
  });
}

AffineChannel canonical_channel(const GammaDelta& gd, Qubit out) {
  const double sg = std::sin(gd.gamma), cg = std::cos(gd.gamma);
  const double sd = std::sin(gd.delta), cd = std::cos(gd.delta);
  AffineChannel ch;
  if (out == Qubit::a) {
    ch.m.diagonal() << sg, sd, sg * sd;
    ch.d << 0.0, 0.0, cg * cd;
  } else {
    ch.m.diagonal() << cd, cg, cg * cd;
    ch.d << 0.0, 0.0, sg * sd;
  }
  return ch;
}

std::array<double, 4> optimality_betas(const GammaDelta& gd) {
  const double cd = std::cos(0.5 * gd.delta), sd = std::sin(0.5 * gd.delta);
  const double cg = std::cos(0.5 * gd.gamma), sg = std::sin(0.5 * gd.gamma);
  return {cd * cg, cd * sg, sd * cg, sd * sg};
}

EllipsoidReport ellipsoid_report(const AffineChannel& ch, const EllipsoidOptions& opt) {
  EllipsoidReport rep;
  rep.center = ch.d;
  rep.signed_m = ch.m;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(ch.m, Eigen::ComputeFullU);
  rep.semi_axes = svd.singularValues();
  rep.axis_directions = svd.matrixU();

  // Every input touches: M orthogonal and d = 0.
  if (ch.d.norm() <= opt.touch_tol && (rep.semi_axes.array() - 1.0).abs().maxCoeff() <= opt.touch_tol) {
    rep.max_norm = 1.0;
    rep.tangency = TangencyKind::continuum;
    return rep;
  }

  const int nt = opt.grid_theta, np = opt.grid_phi;
  auto grid_point = [&](int i, int j) {
    const double th = kPi * (i + 0.5) / nt;
    const double ph = 2.0 * kPi * j / np;
    return Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  };
  std::vector<double> val(static_cast<std::size_t>(nt * np));
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) val[i * np + j] = sq_norm_image(ch, grid_point(i, j));
  }

  // Refine from every grid local maximum.
  std::vector<Eigen::Vector3d> maxima;
  double best = 0.0;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) {
      const double v = val[i * np + j];
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di;
          if (ii < 0 || ii >= nt) continue;
          const int jj = (j + dj + np) % np;
          if (val[ii * np + jj] > v) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      const Eigen::Vector3d u = refine(ch, grid_point(i, j), opt.newton_steps);
      best = std::max(best, std::sqrt(sq_norm_image(ch, u)));
      maxima.push_back(u);
    }
  }
  rep.max_norm = best;

  // Touching inputs, clustered; each cluster keeps its best member.
  std::vector<Eigen::Vector3d> reps;
  for (const auto& u : maxima) {
    const double n = std::sqrt(sq_norm_image(ch, u));
    if (n < 1.0 - opt.touch_tol) continue;
    auto hit = std::find_if(reps.begin(), reps.end(), [&](const Eigen::Vector3d& r) {
      return (r - u).norm() < opt.cluster_radius;
    });
    if (hit == reps.end()) {
      reps.push_back(u);
    } else if (n > std::sqrt(sq_norm_image(ch, *hit))) {
      *hit = u;
    }
  }
  if (reps.empty()) return rep;
  if (reps.size() > 2) {
    rep.tangency = TangencyKind::continuum;
    return rep;
  }
  rep.tangency = TangencyKind::points;
  for (const auto& u : reps) {
    rep.tangency_inputs.push_back(u);
    rep.tangency_points.push_back((ch.m * u + ch.d).normalized());
  }
  return rep;
}

}  // namespace qcopier
