#include <benchmark/benchmark.h>

#include "citopt/chattering.hpp"
#include "citopt/nonexistence.hpp"
#include "citopt/planner.hpp"
#include "citopt/surfaces.hpp"

namespace {

const citopt::ChatteringConstants& constants() {
  static const auto c = citopt::solve_constants();
  return c;
}

void BM_SolveConstants(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(citopt::solve_constants());
}
BENCHMARK(BM_SolveConstants)->Unit(benchmark::kMillisecond);

void BM_Transfer(benchmark::State& st) {
  const auto& c = constants();
  for (auto _ : st) benchmark::DoNotOptimize(citopt::solve_transfer({}, c, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Transfer)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_RestToRest(benchmark::State& st) {
  using citopt::Bound;
  const citopt::Bounds b{4, {Bound::of(1), Bound::of(1), Bound::of(1.5), Bound::of(4), Bound::of(15)}};
  const auto spec = citopt::RestToRestSpec::symmetric(b);
  const auto& c = constants();
  for (auto _ : st) benchmark::DoNotOptimize(citopt::plan_rest_to_rest(spec, c));
}
BENCHMARK(BM_RestToRest)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& st) {
  const citopt::SwitchingSurfaces sw(constants());
  for (auto _ : st) benchmark::DoNotOptimize(sw.classify({1.0, 0.3, 0.2}));
}
BENCHMARK(BM_Classify);

void BM_SynthesizeApproach(benchmark::State& st) {
  const citopt::SwitchingSurfaces sw(constants());
  for (auto _ : st) benchmark::DoNotOptimize(sw.synthesize_approach({1.0, 0.0, 0.0}));
}
BENCHMARK(BM_SynthesizeApproach)->Unit(benchmark::kMicrosecond);

void BM_Recursion(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(citopt::run_recursion(1.0, 0.9, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Recursion)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
