// Serial vs. parallel timing of the multi-start optimizer and the
// Monte-Carlo kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "selfbh/optimizer.hpp"
#include "selfbh/zf_validator.hpp"

namespace {

using namespace selfbh;

Execution policy(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_Optimize(benchmark::State& state, Scheme scheme) {
  OptimizerOptions opts;
  opts.n_starts = 16;
  opts.execution = policy(state);
  const SystemParams params = SystemParams::reference();
  for (auto _ : state) benchmark::DoNotOptimize(optimize(scheme, params, opts).best_rates.c_s);
}
BENCHMARK_CAPTURE(BM_Optimize, fd, Scheme::FullDuplex)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Optimize, rl, Scheme::HybridRelay)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Wishart(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(wishart_trace_check(200, 16, 500, 7, policy(state)).empirical_mean);
  }
}
BENCHMARK(BM_Wishart)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Normalization(benchmark::State& state) {
  const std::vector<double> gains(20, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalization_check(40, 4, 16, gains, 1000, 7, policy(state)).mean_norm2);
  }
}
BENCHMARK(BM_Normalization)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
