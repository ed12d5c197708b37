#include "evolab/time_axis.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace evolab;

namespace {

WeightedSignal make_signal(int n_samples, int dim) {
  TimeGrid grid(0.0, 16.0, n_samples);
  Mat values(dim, n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const double v = std::exp(-std::pow((grid.time(s) - 7.0) / 1.1, 2));
    for (int i = 0; i < dim; ++i) values(i, s) = v * (1.0 + 0.01 * i);
  }
  return WeightedSignal(grid, std::move(values), 2.0);
}

}  // namespace

static void BM_fourier_laplace(benchmark::State& state) {
  const WeightedSignal f = make_signal(static_cast<int>(state.range(0)),
                                       static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fourier_laplace(f));
  }
}
BENCHMARK(BM_fourier_laplace)->Args({1024, 1})->Args({1024, 64})->Args({4096, 64});

static void BM_roundtrip(benchmark::State& state) {
  const WeightedSignal f = make_signal(static_cast<int>(state.range(0)), 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_fourier_laplace(fourier_laplace(f)));
  }
}
BENCHMARK(BM_roundtrip)->Arg(1024)->Arg(4096);

static void BM_antiderivative(benchmark::State& state) {
  const WeightedSignal f = make_signal(static_cast<int>(state.range(0)), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(antiderivative(f));
  }
}
BENCHMARK(BM_antiderivative)->Arg(4096);
