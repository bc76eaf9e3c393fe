#include "qcopier/kernels.hpp"

#include <exception>
#include <random>

#include "qcopier/rng.hpp"

namespace qcopier {

namespace {

/// out[i] = f(in[i]); the first exception thrown by any element is rethrown.
template <class Out, class In, class F>
std::vector<Out> map_indexed(const std::vector<In>& in, Exec exec, F&& f) {
  std::vector<Out> out(in.size());
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(in.size());
  const auto n = static_cast<std::int64_t>(in.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = f(in[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Eigen::Vector3d sorted_singular_values(const Eigen::Matrix3d& m) {
  return Eigen::JacobiSVD<Eigen::Matrix3d>(m).singularValues();
}

}  // namespace

double Axis::at(int i) const {
  if (steps <= 1) return min;
  return min + (max - min) * i / static_cast<double>(steps - 1);
}

std::vector<GammaDelta> grid_points(const GridSpec& g) {
  if (g.gamma.steps < 0 || g.delta.steps < 0) throw ValidationError("grid: negative step count");
  std::vector<GammaDelta> pts;
  pts.reserve(static_cast<std::size_t>(g.gamma.steps) * static_cast<std::size_t>(g.delta.steps));
  for (int i = 0; i < g.gamma.steps; ++i) {
    for (int j = 0; j < g.delta.steps; ++j) pts.push_back({g.gamma.at(i), g.delta.at(j)});
  }
  return pts;
}

SweepRow sweep_point(const GammaDelta& gd) {
  const Isometry v = canonical_isometry(gd.params());
  const AffineChannel a = channel_of_isometry(v, Qubit::a);
  const AffineChannel b = channel_of_isometry(v, Qubit::b);
  const StochasticCopier sc = StochasticCopier::single(v);
  const ModeRates x = analytic_mode_rates(sc, Mode::x);
  const ModeRates y = analytic_mode_rates(sc, Mode::y);
  SweepRow row;
  row.gamma = gd.gamma;
  row.delta = gd.delta;
  row.axes_a = sorted_singular_values(a.m);
  row.axes_b = sorted_singular_values(b.m);
  row.center_a = a.d;
  row.center_b = b.d;
  row.rates = {x.p, x.q, y.p, y.q};
  return row;
}

std::vector<SweepRow> sweep(const std::vector<GammaDelta>& points, Exec exec) {
  return map_indexed<SweepRow>(points, exec, sweep_point);
}

std::vector<CanonicalizeDetail> batch_canonicalize(const std::vector<Isometry>& vs, Exec exec) {
  return map_indexed<CanonicalizeDetail>(vs, exec, canonicalize_detailed);
}

std::vector<Isometry> random_isometries(std::size_t n, std::uint64_t seed) {
  std::vector<Isometry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 gen(splitmix64(seed ^ splitmix64(i)));
    const COp u = random_unitary(4, gen);
    out.push_back(isometry_from_unitary(u, random_state(2, gen)));
  }
  return out;
}

}  // namespace qcopier
