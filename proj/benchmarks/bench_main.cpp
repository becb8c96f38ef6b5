#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "curvflow/dualflow.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/hypersurface.hpp"
#include "curvflow/symfunc.hpp"

using namespace curvflow;

static void BM_SigmaAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<double> lambda(n);
  for (auto& x : lambda) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(symfunc::sigma_all(lambda));
}
BENCHMARK(BM_SigmaAll)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_Quotient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = 1.0 + 0.1 * i;
  for (auto _ : state) benchmark::DoNotOptimize(symfunc::quotient(lambda, n / 2));
}
BENCHMARK(BM_Quotient)->Arg(2)->Arg(4)->Arg(8);

static void BM_Geometry(benchmark::State& state) {
  const auto p = RadialProfile::perturbed(2, static_cast<std::size_t>(state.range(0)), 0.8, 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hypersurface::geometry(p, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Geometry)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oN);

static void BM_FlowStep(benchmark::State& state) {
  const auto p = RadialProfile::perturbed(2, static_cast<std::size_t>(state.range(0)), 0.8, 0.05, 2);
  const double dt = flow::stable_dt(hypersurface::geometry(p, 1), {});
  for (auto _ : state) benchmark::DoNotOptimize(flow::step(p, dt, 1));
}
BENCHMARK(BM_FlowStep)->Arg(128)->Arg(256)->Arg(512);

static void BM_DualStep(benchmark::State& state) {
  const std::size_t N = static_cast<std::size_t>(state.range(0));
  const auto p = RadialProfile::perturbed(2, N, 0.8, 0.05, 2);
  const auto u = dual::import_support(p, N);
  const double dt = dual::stable_dt(dual::support_closure(2, u), 1, {});
  for (auto _ : state) benchmark::DoNotOptimize(dual::step(2, u, dt, 1));
}
BENCHMARK(BM_DualStep)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
