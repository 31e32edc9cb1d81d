#include <benchmark/benchmark.h>

#include "fsde/fbm.hpp"
#include "fsde/schemes.hpp"

namespace {

const fsde::Coefficient& sigma() {
  static const fsde::Coefficient c = fsde::Coefficient::parse("2 + sin(x)");
  return c;
}

// Scheme only; the exact solution is not computed.
void BM_MilsteinApprox(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const fsde::SchemeRunner runner(sigma(), fsde::SchemeSpec::milstein(m));
  const fsde::FbmPath path = fsde::sample_path(0.7, 4096, 3);
  for (auto _ : state) benchmark::DoNotOptimize(runner.approximate(0.0, path));
  state.SetItemsProcessed(state.iterations() * path.n());
}
BENCHMARK(BM_MilsteinApprox)->DenseRange(0, 4);

void BM_CrankNicholsonApprox(benchmark::State& state) {
  const fsde::SchemeRunner runner(sigma(), fsde::SchemeSpec::crank_nicholson_scheme());
  const fsde::FbmPath path = fsde::sample_path(0.45, 4096, 3);
  for (auto _ : state) benchmark::DoNotOptimize(runner.approximate(0.0, path));
  state.SetItemsProcessed(state.iterations() * path.n());
}
BENCHMARK(BM_CrankNicholsonApprox);

// Scheme plus exact flow plus errors, as in one Monte Carlo path.
void BM_FullRun(benchmark::State& state) {
  const fsde::SchemeRunner runner(sigma(), fsde::SchemeSpec::milstein(1));
  const fsde::FbmPath path = fsde::sample_path(0.45, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(runner.run(0.0, path));
}
BENCHMARK(BM_FullRun)->RangeMultiplier(4)->Range(256, 16384);

}  // namespace
