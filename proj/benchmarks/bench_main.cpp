#include <benchmark/benchmark.h>

#include <cmath>

#include "edp/conditional_gibbs.hpp"
#include "edp/exceedance_tail.hpp"
#include "edp/grid_density.hpp"
#include "edp/sampling.hpp"
#include "edp/tilted_calculus.hpp"

namespace {

// Fresh specs per iteration so the tilt memo does not hide the quadrature.
void BM_LogMgf(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const edp::DensitySpec spec = edp::weibull(2.0);
    benchmark::DoNotOptimize(edp::log_mgf(spec, t));
  }
}
BENCHMARK(BM_LogMgf)->Arg(1)->Arg(100)->Arg(10000);

void BM_SolveTilt(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const edp::DensitySpec spec = edp::double_exponential();
    benchmark::DoNotOptimize(edp::solve_tilt(spec, a).t);
  }
}
BENCHMARK(BM_SolveTilt)->Arg(2)->Arg(8)->Arg(16);

void BM_Convolution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const edp::DensitySpec spec = edp::weibull(2.0);
  const edp::GridDensity base = edp::tabulate(
      [&](double x) { return x > 0.0 ? std::exp(edp::log_density(spec, x)) : 0.0; }, 0.0, 6.0 / n, n);
  const auto method = state.range(1) == 0 ? edp::ConvolutionMethod::Fft : edp::ConvolutionMethod::Direct;
  for (auto _ : state) benchmark::DoNotOptimize(edp::convolve(base, base, method).mass);
}
BENCHMARK(BM_Convolution)->Args({1024, 0})->Args({1024, 1})->Args({8192, 0});

void BM_ConditionalOracle(benchmark::State& state) {
  const edp::DensitySpec spec = edp::weibull(2.0);
  for (auto _ : state) {
    const edp::ConditionalOracle oracle(spec, static_cast<int>(state.range(0)), 3.0);
    benchmark::DoNotOptimize(oracle.points());
  }
}
BENCHMARK(BM_ConditionalOracle)->Arg(8)->Arg(32);

void BM_TiltedSampling(benchmark::State& state) {
  const edp::DensitySpec spec = edp::weibull(2.0);
  const double t = edp::solve_tilt(spec, 3.0).t;
  for (auto _ : state) benchmark::DoNotOptimize(edp::sample_tilted(spec, t, 100000, 7).back());
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_TiltedSampling);

void BM_TailEstimate(benchmark::State& state) {
  const edp::DensitySpec spec = edp::weibull(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(edp::mc_tail_estimate(spec, 32, 2.0, 20000, 7).log_p_mc);
}
BENCHMARK(BM_TailEstimate);

}  // namespace

BENCHMARK_MAIN();
