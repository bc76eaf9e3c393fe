#include <benchmark/benchmark.h>

#include "qcopier/kernels.hpp"
#include "qcopier/protocols.hpp"

using namespace qcopier;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "parallel"); }

void BM_Bb84(benchmark::State& s) {
  const Bb84Config cfg{kPi / 4, kPi / 4, 200000, 1};
  for (auto _ : s) benchmark::DoNotOptimize(simulate_bb84(cfg, exec_of(s)).empirical.p_x);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(cfg.n_trials));
  label(s);
}

void BM_B92(benchmark::State& s) {
  const B92Config cfg{kPi / 8, 0.3, 0.9, 200000, 1};
  for (auto _ : s) benchmark::DoNotOptimize(simulate_b92(cfg, exec_of(s)).eve_success);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(cfg.n_trials));
  label(s);
}

void BM_Sweep(benchmark::State& s) {
  const auto pts = grid_points({{0.0, kPi, 41}, {0.0, kPi, 41}});
  for (auto _ : s) benchmark::DoNotOptimize(sweep(pts, exec_of(s)).size());
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(pts.size()));
  label(s);
}

void BM_Canonicalize(benchmark::State& s) {
  const auto vs = random_isometries(500, 1);
  for (auto _ : s) benchmark::DoNotOptimize(batch_canonicalize(vs, exec_of(s)).size());
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(vs.size()));
  label(s);
}

}  // namespace

BENCHMARK(BM_Bb84)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_B92)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Canonicalize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
