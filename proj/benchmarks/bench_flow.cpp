#include <benchmark/benchmark.h>

#include "fsde/flow.hpp"

namespace {

void BM_FlowEval(benchmark::State& state) {
  const fsde::FlowSolver flow(fsde::Coefficient::parse("2 + sin(x)"));
  const double y = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(flow.eval(0.3, y));
}
BENCHMARK(BM_FlowEval)->Arg(1)->Arg(10)->Arg(100)->Arg(300);

void BM_FlowPath(benchmark::State& state) {
  const fsde::FlowSolver flow(fsde::Coefficient::parse("2 + sin(x)"));
  const fsde::FbmPath path = fsde::sample_path(0.45, static_cast<int>(state.range(0)), 11);
  for (auto _ : state) benchmark::DoNotOptimize(flow.path(0.0, path));
  state.SetItemsProcessed(state.iterations() * path.n());
}
BENCHMARK(BM_FlowPath)->RangeMultiplier(4)->Range(256, 4096);

void BM_Taylor(benchmark::State& state) {
  const fsde::FlowSolver flow(fsde::Coefficient::parse("2 + sin(x)"));
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(flow.taylor(0.3, 0.01, m));
}
BENCHMARK(BM_Taylor)->DenseRange(0, 4);

}  // namespace
