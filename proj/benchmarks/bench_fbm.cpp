#include <benchmark/benchmark.h>

#include "fsde/fbm.hpp"

namespace {

void BM_Circulant(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fsde::FbmSampler sampler(0.45, n, fsde::SamplingMethod::circulant);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(seed++));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Circulant)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

void BM_Cholesky(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fsde::FbmSampler sampler(0.45, n, fsde::SamplingMethod::cholesky);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(seed++));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Cholesky)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

}  // namespace
