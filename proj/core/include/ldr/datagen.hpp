#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ldr/spectral.hpp"
#include "ldr/types.hpp"

namespace ldr::data {

struct ClassSpec {
  Index dim = 1;
  Index samples = 30;
  double noise = 0.0;
};

/// Union-of-subspaces generator specification. Bases depend only on
/// `basis_seed`, so fresh sample draws (a different sample seed) share the
/// same ground-truth subspaces.
struct SubspaceMixtureSpec {
  Index ambient_dim = 8;
  std::vector<ClassSpec> classes;
  std::uint64_t basis_seed = 0;
  /// Optional rejection threshold (radians) on the smallest pairwise
  /// principal angle. A value within 1e-9 of pi/2 requests exactly
  /// orthogonal subspaces, built by slicing one joint orthonormal basis.
  std::optional<double> min_principal_angle{};

  void validate() const;
};

struct SubspaceMixture {
  Matrix X;  // ambient_dim x n, unit-norm columns
  Partition part;
  std::vector<Matrix> bases;  // ground-truth orthonormal bases per class
};

/// Deterministic in (spec, seed). Stream usage: bases draw from
/// basis_seed streams (attempt a -> stream a), class-j coordinates from
/// stream(100 + j) of the sample seed and class-j noise from
/// stream(200 + j). Columns are normalized after the noise is added.
SubspaceMixture sample_subspace_mixture(const SubspaceMixtureSpec& spec, std::uint64_t seed);

enum class ManifoldKind { Circles, Helix, MoonsOnSphere };

/// Two-class nonlinear submanifold stress inputs on the unit sphere; no
/// ground-truth subspaces.
std::pair<Matrix, Partition> sample_nonlinear_manifolds(ManifoldKind kind, Index n, double noise,
                                                        std::uint64_t seed);

/// Augmentation families for the self-supervised partition.
struct ShiftAugment {
  Index taps = 0;       // T of the underlying C x T signals (d = C * T)
  Index range = 0;      // 0 means all T shifts
};
struct RotationAugment {
  int copies = 4;
  double max_angle = 0.1;  // radians, Givens rotation in a random plane
};
struct NoiseAugment {
  int copies = 4;
  double sigma = 1e-2;
};
using Augment = std::variant<ShiftAugment, RotationAugment, NoiseAugment>;

struct AugmentedSet {
  Matrix X;        // original columns followed by their augmentations, grouped per sample
  Partition part;  // k = original n; class i = sample i plus its augmentations
};

/// Views every sample and its augmentations as one new class. Zero copies
/// yield singleton classes. Deterministic per seed.
AugmentedSet self_supervised_partition(const Matrix& X, const Augment& aug, std::uint64_t seed);

/// Random unit-norm multi-channel signals for the shift-orbit experiments.
/// `smooth_taps` > 0 low-passes each channel with a cyclic moving average
/// before normalization, which makes shift orbits overlap less.
std::vector<spectral::MultiChannelSignal> random_signals(Index channels, Index taps, Index count,
                                                         double noise, std::uint64_t seed,
                                                         Index smooth_taps = 0);

}  // namespace ldr::data
