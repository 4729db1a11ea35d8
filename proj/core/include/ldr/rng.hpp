#pragma once

#include <cstdint>
#include <random>

#include "ldr/types.hpp"

namespace ldr {

/// Seedable generator with reproducible output across builds and platforms.
///
/// The raw stream is std::mt19937_64 (sequence mandated by the standard).
/// Gaussian variates use the polar Box-Muller method on explicitly
/// constructed 53-bit uniforms, so no library-dependent distribution code is
/// involved.
///
/// Stream splitting: `stream(id)` derives an independent child generator via
/// a splitmix64 hash of (seed, id). Data generators document which stream id
/// feeds which part of a dataset (bases, coordinates, noise, ...), so any
/// part can be regenerated in isolation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child stream; deterministic in (seed, id).
  Rng stream(std::uint64_t id) const;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via polar Box-Muller.
  double gaussian();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// d x n matrix of independent standard normals, column-major fill order.
  Matrix gaussian_matrix(Index rows, Index cols);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; the mixing function behind Rng::stream.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ldr
