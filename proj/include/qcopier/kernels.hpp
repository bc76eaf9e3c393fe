#pragma once

// Batch kernels over parameter grids and unitary samples.  Every kernel has
// a serial reference path and an OpenMP path producing identical output.

#include <vector>

#include "qcopier/bloch.hpp"
#include "qcopier/canonical.hpp"
#include "qcopier/protocols.hpp"

namespace qcopier {

/// Inclusive linear grid; steps = 0 gives no points, steps = 1 gives min.
struct Axis {
  double min = 0.0;
  double max = 0.0;
  int steps = 0;

  double at(int i) const;
};

struct GridSpec {
  Axis gamma;
  Axis delta;
};

/// Row-major, gamma outer.
std::vector<GammaDelta> grid_points(const GridSpec& g);

struct SweepRow {
  double gamma = 0.0;
  double delta = 0.0;
  Eigen::Vector3d axes_a = Eigen::Vector3d::Zero();  // descending
  Eigen::Vector3d axes_b = Eigen::Vector3d::Zero();
  Eigen::Vector3d center_a = Eigen::Vector3d::Zero();
  Eigen::Vector3d center_b = Eigen::Vector3d::Zero();
  ErrorRates rates;  // from the output densities
};

/// Probed channels and per-mode error rates of V_c(gamma, delta).
SweepRow sweep_point(const GammaDelta& gd);
std::vector<SweepRow> sweep(const std::vector<GammaDelta>& points, Exec exec = Exec::parallel);

std::vector<CanonicalizeDetail> batch_canonicalize(const std::vector<Isometry>& vs,
                                                   Exec exec = Exec::parallel);

/// n seeded Haar-random (U, |b>) pairs; pair i depends only on (seed, i).
std::vector<Isometry> random_isometries(std::size_t n, std::uint64_t seed);

}  // namespace qcopier
