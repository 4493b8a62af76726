#include <benchmark/benchmark.h>

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/inference.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/operators.hpp"
#include "ccmfbm/simulation.hpp"

using namespace ccmfbm;

namespace {

const ModelParams kParams(1.0, 1.0, 0.75);
const SeriesSpec kSeries{1e-10, 400};

void BM_MgKernel(benchmark::State& state) {
  double s = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mg_kernel(0.75, 1.0, s));
    s = s < 0.98 ? s + 0.01 : 0.01;
  }
}
BENCHMARK(BM_MgKernel);

void BM_InverseKernel(benchmark::State& state) {
  const InverseKernel inverse(kParams, kSeries);
  double s = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse(1.0, s));
    s = s < 0.98 ? s + 0.01 : 0.01;
  }
}
BENCHMARK(BM_InverseKernel);

void BM_CcmfbmCov(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ccmfbm_cov(kParams, 0.7, 0.4));
}
BENCHMARK(BM_CcmfbmCov);

void BM_ForwardOperator(benchmark::State& state) {
  const TimeGrid grid(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_forward_operator(kParams, grid));
}
BENCHMARK(BM_ForwardOperator)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_InverseOperator(benchmark::State& state) {
  const TimeGrid grid(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_inverse_operator(kParams, grid, kSeries));
}
BENCHMARK(BM_InverseOperator)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto scheme = static_cast<Scheme>(state.range(0));
  SimConfig cfg{.params = kParams, .grid = TimeGrid(1.0, 256), .n_paths = 100, .seed = 1, .scheme = scheme};
  cfg.series_terms = 64;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
  state.SetLabel(std::string(scheme_name(scheme)));
}
BENCHMARK(BM_Simulate)
    ->Arg(static_cast<int>(Scheme::cholesky))
    ->Arg(static_cast<int>(Scheme::mg_approx))
    ->Arg(static_cast<int>(Scheme::series))
    ->Unit(benchmark::kMillisecond);

void BM_Predictor(benchmark::State& state) {
  const TimeGrid grid(1.0, 128);
  for (auto _ : state) benchmark::DoNotOptimize(Predictor(kParams, grid, 0.5, {0.6, 0.8, 1.0}, kSeries));
}
BENCHMARK(BM_Predictor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
