// Coding-rate and gradient evaluation across feature shapes.

#include <benchmark/benchmark.h>

#include "ldr/rate.hpp"
#include "ldr/rng.hpp"

namespace {

using ldr::Index;
using ldr::Matrix;
namespace rate = ldr::rate;

void BM_CodingRate(benchmark::State& state) {
  ldr::Rng rng(11);
  const Matrix Z = rng.gaussian_matrix(state.range(0), state.range(1));
  const double alpha = rate::alpha_for(rate::RateParams{}, Z.rows(), Z.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate::coding_rate(Z, alpha));
  }
}

void BM_RateGradient(benchmark::State& state) {
  ldr::Rng rng(13);
  const Matrix Z = rng.gaussian_matrix(state.range(0), state.range(1));
  const double alpha = rate::alpha_for(rate::RateParams{}, Z.rows(), Z.cols());
  for (auto _ : state) {
    auto g = rate::rate_gradient(Z, alpha);
    benchmark::DoNotOptimize(g.data());
  }
}

}  // namespace

BENCHMARK(BM_CodingRate)->Args({8, 64})->Args({32, 256})->Args({128, 64});
BENCHMARK(BM_RateGradient)->Args({8, 64})->Args({32, 256})->Args({128, 64});

BENCHMARK_MAIN();
