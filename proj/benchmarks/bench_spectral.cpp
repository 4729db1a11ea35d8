// Spectral vs dense application of block-circulant operators.

#include <benchmark/benchmark.h>

#include "ldr/datagen.hpp"
#include "ldr/rate.hpp"
#include "ldr/spectral.hpp"

namespace {

using ldr::Index;
using ldr::Matrix;
using ldr::Vector;
namespace spectral = ldr::spectral;

struct Fixture {
  spectral::SpectralOperator op;
  Matrix dense;
  spectral::MultiChannelSignal probe;
  Vector probe_vec;
};

Fixture make_fixture(Index channels, Index taps) {
  const auto signals = ldr::data::random_signals(channels, taps, 4, 0.0, 99, 0);
  const double alpha = ldr::rate::alpha_for(ldr::rate::RateParams{}, channels * taps,
                                            static_cast<Index>(signals.size()) * taps);
  Fixture f{spectral::circulant_expansion(signals, alpha),
            Matrix{},
            ldr::data::random_signals(channels, taps, 1, 0.0, 100, 0).front(),
            Vector{}};
  f.dense = spectral::densify(f.op);
  f.probe_vec = spectral::vectorize(f.probe);
  return f;
}

void BM_SpectralApply(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1));
  for (auto _ : state) {
    auto y = spectral::spectral_apply(f.op, f.probe);
    benchmark::DoNotOptimize(y.values.data());
  }
}

void BM_DenseApply(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1));
  Vector y;
  for (auto _ : state) {
    y.noalias() = f.dense * f.probe_vec;
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_CirculantExpansion(benchmark::State& state) {
  const auto signals = ldr::data::random_signals(state.range(0), state.range(1), 8, 0.0, 7, 0);
  const double alpha = 1.0;
  for (auto _ : state) {
    auto op = spectral::circulant_expansion(signals, alpha);
    benchmark::DoNotOptimize(op.blocks.data());
  }
}

}  // namespace

BENCHMARK(BM_SpectralApply)->Args({2, 256})->Args({2, 512})->Args({2, 1024})->Args({3, 512});
BENCHMARK(BM_DenseApply)->Args({2, 256})->Args({2, 512})->Args({2, 1024})->Args({3, 512});
BENCHMARK(BM_CirculantExpansion)->Args({2, 256})->Args({2, 1024});

BENCHMARK_MAIN();
