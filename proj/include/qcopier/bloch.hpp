#pragma once

// Bloch-sphere representation of one-qubit outputs: r_j = Tr(rho sigma_j),
// and the affine maps r -> M r + d induced by a copier on each output.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qcopier/canonical.hpp"
#include "qcopier/linalg.hpp"

namespace qcopier {

struct BlochVector {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();

  double norm() const { return r.norm(); }
};

/// r_j = Tr(rho sigma_j); rho must be a density to within 1e-10.
BlochVector density_to_bloch(const COp& rho);
/// (I + r . sigma) / 2; rejects |r| > 1 + 1e-10.
COp bloch_to_density(const BlochVector& b);

struct AffineChannel {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d d = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& r) const { return m * r + d; }
};

/// gamma = (eta + zeta)/2, delta = (eta - zeta)/2.
struct GammaDelta {
  double gamma = 0.0;
  double delta = 0.0;

  static GammaDelta from_params(const CanonicalParams& p);
  CanonicalParams params() const { return {gamma - delta, gamma + delta}; }
};

/// Channel onto output `out`: d is the image of the maximally mixed input,
/// column j of M the image of the +sigma_j eigenstate minus d.
AffineChannel channel_of_isometry(const Isometry& v, Qubit out);

/// Channel of any map from one-qubit input densities to one-qubit output
/// densities, by the same probing.
AffineChannel channel_of_map(const std::function<COp(const COp&)>& map);

/// Closed forms for V_c:
///   a: M = diag(sin g, sin d, sin g sin d), d = (0, 0, cos g cos d)
///   b: M = diag(cos d, cos g, cos g cos d), d = (0, 0, sin g sin d)
AffineChannel canonical_channel(const GammaDelta& gd, Qubit out);

/// (cos d/2 cos g/2, cos d/2 sin g/2, sin d/2 cos g/2, sin d/2 sin g/2).
std::array<double, 4> optimality_betas(const GammaDelta& gd);

enum class TangencyKind { none, points, continuum };

struct EllipsoidReport {
  Eigen::Vector3d semi_axes = Eigen::Vector3d::Zero();  // descending
  Eigen::Matrix3d axis_directions = Eigen::Matrix3d::Identity();  // columns
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Matrix3d signed_m = Eigen::Matrix3d::Zero();
  double max_norm = 0.0;  // max over unit u of |M u + d|
  TangencyKind tangency = TangencyKind::none;
  std::vector<Eigen::Vector3d> tangency_points;  // images M u + d on the sphere
  std::vector<Eigen::Vector3d> tangency_inputs;  // the unit u producing them
};

struct EllipsoidOptions {
  int grid_theta = 32;
  int grid_phi = 64;
  int newton_steps = 50;
  double touch_tol = 1e-8;
  double cluster_radius = 0.1;
};

EllipsoidReport ellipsoid_report(const AffineChannel& ch, const EllipsoidOptions& opt = {});

}  // namespace qcopier
