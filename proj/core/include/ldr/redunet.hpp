#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ldr/rate.hpp"
#include "ldr/types.hpp"

namespace ldr::redunet {

using rate::RateParams;

/// One unrolled gradient-ascent step: the expansion operator E, the
/// per-class compression operators C^j, the step size eta and the softmax
/// temperature lambda. E and every C^j are symmetric positive-definite
/// resolvents alpha (I + alpha Cov)^{-1}.
struct ReduLayer {
  Matrix E;
  std::vector<Matrix> C;
  double eta = 0.5;
  double lambda = 1.0;
};

struct BuildConfig {
  int num_layers = 30;
  double eta = 0.5;
  double lambda = 1.0;
  RateParams params{};
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Forward-constructed network plus the class subspaces read off the final
/// features. Immutable once built.
struct ReduNetModel {
  std::vector<ReduLayer> layers;
  Index d = 0;
  int k = 0;
  RateParams params{};
  double eta = 0.5;
  double lambda = 1.0;
  /// One orthonormal basis per class, extracted from the final-layer
  /// per-class features.
  std::vector<Matrix> class_subspaces;
};

/// E = alpha (I + alpha Z Z^T)^{-1}; symmetric, eigenvalues in (0, alpha].
Matrix expansion_operator(const Matrix& Z, double alpha);

/// C^j = alpha_j (I + alpha_j Z_j Z_j^T)^{-1}, alpha_j resolved on the class
/// column count. An empty class (allowed only in incremental mode) yields
/// alpha_j I with the n = 1 convention.
std::vector<Matrix> compression_operators(const Matrix& Z, const Partition& part,
                                          const RateParams& params);

/// Softmax membership pi_j proportional to exp(-lambda ||C^j z||); the
/// max-subtracted form is used, so equal distances give the uniform vector.
Vector soft_assignment(const Vector& z, std::span<const Matrix> C, double lambda);

/// Inference step: z' = normalize(z + eta [E z - (1/k) sum_j pi_j C^j z])
/// with pi from soft_assignment (labels unavailable).
Vector layer_forward(const Vector& z, const ReduLayer& layer);

/// Column-by-column layer_forward over a feature matrix.
Matrix layer_forward_batch(const Matrix& Z, const ReduLayer& layer, int threads = 1);

/// Training step with hard class gating: column i of class j advances along
/// the exact ascent direction E z - (1/k) C^j z before renormalization. The
/// softmax replaces this gating only at inference.
Matrix layer_forward_supervised(const Matrix& Z, const ReduLayer& layer, const Partition& part,
                                int threads = 1);

/// Unrolled projected-gradient-ascent construction: each layer's operators
/// are computed from the current features and the training labels, then the
/// features advance through that layer. Deterministic in (inputs, config).
ReduNetModel build_redunet(const Matrix& X, const Partition& part, const BuildConfig& cfg);

struct ForwardRecord {
  Matrix features;
  /// One k x n soft-assignment matrix per layer.
  std::vector<Matrix> assignments;
};

/// Inference through the stored operators; labels are not consulted, the
/// softmax supplies membership.
ForwardRecord forward(const ReduNetModel& model, const Matrix& X, int threads = 1);

/// argmax_j || U_j^T z ||; ties resolve to the lowest class index.
int nearest_subspace_classify(const ReduNetModel& model, const Vector& z);

/// Runs x through the stored layers (inference path) and classifies the
/// final feature against the class subspaces.
int classify_input(const ReduNetModel& model, const Vector& x);

struct RateTraceRow {
  int layer;  // 0 = input features, l = after layer l
  double R = 0.0;
  double Rc = 0.0;
  double dR = 0.0;
};

/// Re-runs X through the model and records (R, R^c, dR) at every layer
/// boundary.
std::vector<RateTraceRow> layer_rate_trace(const ReduNetModel& model, const Matrix& X,
                                           const Partition& part);

/// Orthonormal basis for a class's feature matrix: left singular vectors
/// with singular values >= rel_threshold * sigma_1, rank capped at
/// max(1, d / k).
Matrix class_subspace_basis(const Matrix& Zj, Index d, int k, double rel_threshold = 0.2);

}  // namespace ldr::redunet
