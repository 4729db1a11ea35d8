#pragma once

#include <span>
#include <vector>

#include "ldr/rate.hpp"
#include "ldr/redunet.hpp"
#include "ldr/types.hpp"

namespace ldr::spectral {

using rate::RateParams;
using redunet::BuildConfig;

/// One sample living on a cyclic time axis: C channels x T taps.
struct MultiChannelSignal {
  Matrix values;  // row c = channel c, column t = tap t

  MultiChannelSignal() = default;
  explicit MultiChannelSignal(Matrix v);

  Index channels() const { return values.rows(); }
  Index taps() const { return values.cols(); }
  double norm() const { return values.norm(); }
};

/// Cyclic shift by tau taps: out(c, t) = in(c, (t - tau) mod T).
MultiChannelSignal cyclic_shift(const MultiChannelSignal& x, Index tau);

/// Flattens to a (C*T)-vector with channel-major layout
/// (vec[c*T + t] = x(c, t)); the layout densify() uses.
Vector vectorize(const MultiChannelSignal& x);
MultiChannelSignal unvectorize(const Vector& v, Index channels, Index taps);

/// A block-circulant operator on signals, stored per frequency bin: T
/// Hermitian positive-definite C x C blocks acting on the unitary-DFT
/// coefficient vectors. Real time-domain action requires
/// blocks[T - f mod T] = conj(blocks[f]); `conjugate_symmetric` records that
/// the constructor verified it.
struct SpectralOperator {
  std::vector<ComplexMatrix> blocks;
  double alpha = 0.0;
  bool conjugate_symmetric = false;

  Index bins() const { return static_cast<Index>(blocks.size()); }
  Index channels() const { return blocks.empty() ? 0 : blocks.front().rows(); }
};

/// Largest violation of blocks[T-f] = conj(blocks[f]).
double conjugate_symmetry_error(const SpectralOperator& op);

/// All T cyclic shifts of x (tau = 0 first).
std::vector<MultiChannelSignal> shift_augment(const MultiChannelSignal& x);

struct SignalShape {
  Index channels = 0;
  Index taps = 0;
};

/// Expansion operator of the shift-augmented sample set, computed without
/// materializing the augmentation: per-frequency block
/// alpha (I_C + alpha T Sigma(f))^{-1} with Sigma(f) the per-bin channel
/// covariance of the unitary-DFT'd samples. densify() of the result equals
/// the dense expansion_operator on the explicitly augmented feature matrix.
/// With zero samples the covariance is zero and every block is alpha I_C;
/// the shape must then be supplied.
SpectralOperator circulant_expansion(std::span<const MultiChannelSignal> samples, double alpha,
                                     std::optional<SignalShape> shape = std::nullopt);

/// Per-class analogue of circulant_expansion; alpha_j resolves on the
/// class's augmented column count (n_j * T columns of dimension C * T).
/// An empty class yields constant alpha_j I blocks with the one-signal
/// convention (n_j = 1 signal, i.e. T augmented columns).
std::vector<SpectralOperator> circulant_compressions(std::span<const MultiChannelSignal> samples,
                                                     const Partition& part,
                                                     const RateParams& params);

/// DFT -> per-frequency block multiply -> inverse DFT. O(C^2 T + C T log T).
MultiChannelSignal spectral_apply(const SpectralOperator& op, const MultiChannelSignal& x);

/// Explicit (C*T) x (C*T) block-circulant matrix; testing/benchmark oracle.
Matrix densify(const SpectralOperator& op);

struct SpectralLayer {
  SpectralOperator E;
  std::vector<SpectralOperator> C;
  double eta = 0.5;
  double lambda = 1.0;
};

struct SpectralReduNetModel {
  std::vector<SpectralLayer> layers;
  Index channels = 0;
  Index taps = 0;
  int k = 0;
  RateParams params{};
  double eta = 0.5;
  double lambda = 1.0;
  /// Shift-invariant class subspaces extracted from the shift-augmented
  /// final features, in vectorize() layout.
  std::vector<Matrix> class_subspaces;
};

/// Softmax membership from compression distances ||C^j x||.
Vector soft_assignment(const MultiChannelSignal& x, std::span<const SpectralOperator> C,
                       double lambda);

/// Inference step: x' = normalize(x + eta [E x - (1/k) sum_j pi_j C^j x]);
/// the norm is taken in signal space (equal to the spectral norm under the
/// unitary DFT).
MultiChannelSignal layer_forward(const MultiChannelSignal& x, const SpectralLayer& layer);

/// Training step with hard class gating along the exact ascent direction
/// E x - (1/k) C^{class} x.
MultiChannelSignal layer_forward_supervised(const MultiChannelSignal& x,
                                            const SpectralLayer& layer, int class_index);

/// Same unrolling as build_redunet with block-circulant operators; the
/// implicit feature set is every sample with all its shifts.
SpectralReduNetModel build_spectral_redunet(std::span<const MultiChannelSignal> samples,
                                            const Partition& part, const BuildConfig& cfg);

struct SpectralForwardRecord {
  std::vector<MultiChannelSignal> features;
  std::vector<Matrix> assignments;  // per layer: k x n
};

SpectralForwardRecord forward(const SpectralReduNetModel& model,
                              std::span<const MultiChannelSignal> samples);

/// Replays the training trajectory (hard class gating) of labeled samples
/// through the stored layers.
std::vector<MultiChannelSignal> forward_supervised(const SpectralReduNetModel& model,
                                                   std::span<const MultiChannelSignal> samples,
                                                   const Partition& part);

/// Nearest-subspace decision on the final feature of one signal; invariant
/// to cyclic shifts of the input.
int classify(const SpectralReduNetModel& model, const MultiChannelSignal& x);

/// (R, R^c, dR) per layer boundary, evaluated on the shift-augmented dense
/// features. Desk-scale diagnostic.
std::vector<redunet::RateTraceRow> layer_rate_trace(const SpectralReduNetModel& model,
                                                    std::span<const MultiChannelSignal> samples,
                                                    const Partition& part);

/// Dense feature matrix of all shifts of all samples (column order: sample
/// 0 shifts 0..T-1, sample 1 shifts 0..T-1, ...), with the matching
/// partition labels.
std::pair<Matrix, Partition> augment_to_feature_matrix(std::span<const MultiChannelSignal> samples,
                                                       const Partition& part);

}  // namespace ldr::spectral
