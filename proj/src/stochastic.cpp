#include "qcopier/stochastic.hpp"

#include <cmath>

namespace qcopier {

namespace {

constexpr double kProbTol = 1e-12;

void check_probabilities(const std::vector<double>& p) {
  double sum = 0.0;
  for (const double x : p) {
    if (!(x >= 0.0)) throw ValidationError("copier: negative branch probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbTol) throw ValidationError("copier: probabilities do not sum to 1");
}

}  // namespace

StochasticCopier::StochasticCopier(std::vector<CopierBranch> branches)
    : branches_(std::move(branches)) {
  if (branches_.empty()) throw ValidationError("copier: no branches");
  std::vector<double> p;
  for (const auto& b : branches_) p.push_back(b.p);
  check_probabilities(p);
}

StochasticCopier StochasticCopier::single(const Isometry& v) { return StochasticCopier({{1.0, v}}); }

AffineChannel averaged_channel(const StochasticCopier& sc, Qubit out) {
  AffineChannel avg;
  for (const auto& b : sc.branches()) {
    const AffineChannel ch = channel_of_isometry(b.v, out);
    avg.m += b.p * ch.m;
    avg.d += b.p * ch.d;
  }
  return avg;
}

ReducedOutputs mixed_output(const StochasticCopier& sc, const COp& rho_in) {
  ReducedOutputs mix{COp::zero(2), COp::zero(2)};
  for (const auto& b : sc.branches()) {
    const ReducedOutputs o = apply_channel(b.v, rho_in);
    mix.rho_a = mix.rho_a + o.rho_a * b.p;
    mix.rho_b = mix.rho_b + o.rho_b * b.p;
  }
  return mix;
}

StochasticCopier centered_copier(const GammaDelta& gd0, double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ValidationError("centered_copier: p0 outside [0, 1]");
  const Isometry v0 = canonical_isometry(gd0.params());
  const Isometry raw = canonical_isometry(GammaDelta{gd0.gamma, kPi - gd0.delta}.params());
  const COp rb = tensor(COp::identity(2), rotation(kPi));
  const Isometry v1(rb * raw.column(0), rb * raw.column(1));
  return StochasticCopier({{p0, v0}, {1.0 - p0, v1}});
}

StochasticCopier UnitaryBranches::copier() const {
  if (p.size() != u.size()) throw ValidationError("UnitaryBranches: size mismatch");
  std::vector<CopierBranch> br;
  for (std::size_t i = 0; i < u.size(); ++i) br.push_back({p[i], isometry_from_unitary(u[i], b_init)});
  return StochasticCopier(std::move(br));
}

UnitaryBranches centered_unitary_branches(const GammaDelta& gd0, double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ValidationError("centered_unitary_branches: p0 outside [0, 1]");
  Circuit c1 = build_fig2a({gd0.gamma, kPi - gd0.delta});
  c1.gates.push_back(Gate::rot(Qubit::b, kPi));
  return {{p0, 1.0 - p0}, {compile(build_fig2a(gd0)), compile(c1)}, CVec::basis(2, 0)};
}

CoinEmbedding coin_embedding(const UnitaryBranches& ub) {
  if (ub.u.size() != 2 || ub.p.size() != 2) {
    throw ValidationError("coin_embedding: exactly two branches required");
  }
  check_probabilities(ub.p);
  for (const COp& u : ub.u) {
    if (u.dim() != 4 || !u.is_unitary()) throw ValidationError("coin_embedding: branch is not a two-qubit unitary");
  }
  CoinEmbedding ce;
  ce.u8 = tensor(COp::projector(CVec::basis(2, 0)), ub.u[0]) +
          tensor(COp::projector(CVec::basis(2, 1)), ub.u[1]);
  ce.coin_state = CVec{std::sqrt(ub.p[0]), std::sqrt(ub.p[1])};
  ce.b_init = ub.b_init;
  return ce;
}

AffineChannel embedded_channel(const CoinEmbedding& ce, Qubit out) {
  const COp coin = COp::projector(ce.coin_state);
  const COp b = COp::projector(ce.b_init);
  return channel_of_map([&](const COp& rho_in) {
    const COp in8 = tensor(coin, tensor(rho_in, b));
    const COp ab = trace_out_leading(ce.u8 * in8 * ce.u8.adjoint());
    return partial_trace(ab, out);
  });
}

std::size_t sample_branch(const StochasticCopier& sc, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const auto& br = sc.branches();
  for (std::size_t i = 0; i < br.size(); ++i) {
    acc += br[i].p;
    if (u < acc) return i;
  }
  // rounding in the cumulative sum: last branch with positive weight
  for (std::size_t i = br.size(); i-- > 0;) {
    if (br[i].p > 0.0) return i;
  }
  return 0;
}

}  // namespace qcopier
