#pragma once

#include <optional>

#include "ldr/types.hpp"

namespace ldr::rate {

/// Quantization precision and the convention used to resolve the rate
/// scaling alpha.
///
/// CountScaled (the default) resolves alpha = d / (n * epsilon^2) on the
/// matrix it is applied to, which makes coding rates invariant to sample
/// duplication. Setting `fixed_alpha` switches to a constant alpha.
struct RateParams {
  double epsilon = 0.5;
  std::optional<double> fixed_alpha{};
  /// Empty classes normally contribute rate 0 but still count toward the
  /// 1/k average; with skip_empty they are dropped from the average.
  bool skip_empty = false;
  /// Weight per-class rates by class size instead of uniformly.
  bool size_weighted = false;
};

/// Resolves alpha for a d x n matrix. CountScaled -> d/(n eps^2); Fixed -> a.
/// n = 0 or eps < 1e-6 (alpha overflow guard) raise DegenerateInput.
double alpha_for(const RateParams& params, Index d, Index n);

/// Coding rate R(Z) = 1/2 log det(I + alpha Z Z^T).
///
/// Evaluated through a Cholesky log-det on the smaller Gram side (d x d when
/// n >= d, n x n otherwise), never through a plain determinant.
double coding_rate(const Matrix& Z, double alpha);

/// Average per-class coding rate R^c; each class resolves its own alpha on
/// its column count in CountScaled mode.
double class_rate_average(const Matrix& Z, const Partition& part, const RateParams& params);

/// Rate reduction dR(Z) = R(Z) - R^c(Z). Not guaranteed nonnegative for
/// arbitrary alpha conventions.
double rate_reduction(const Matrix& Z, const Partition& part, const RateParams& params);

/// dR/dZ = alpha (I + alpha Z Z^T)^{-1} Z, via an SPD solve on the smaller
/// Gram side.
Matrix rate_gradient(const Matrix& Z, double alpha);

/// d(dR)/dZ: expansion term on every column minus the weighted per-class
/// compression term scattered back to each class's columns.
Matrix rate_reduction_gradient(const Matrix& Z, const Partition& part, const RateParams& params);

/// dR(Z, Zhat) = R([Z Zhat]) - (R(Z) + R(Zhat)) / 2. In CountScaled mode the
/// union resolves alpha on the union's column count, so dR(Z, Z) = 0.
double pairwise_rate_reduction(const Matrix& Z, const Matrix& Zhat, const RateParams& params);

struct PairwiseGradients {
  Matrix d_Z;
  Matrix d_Zhat;
};

/// Gradients of pairwise_rate_reduction with respect to both arguments.
PairwiseGradients pairwise_rate_reduction_gradients(const Matrix& Z, const Matrix& Zhat,
                                                    const RateParams& params);

/// Per-class weights used by class_rate_average / rate_reduction_gradient:
/// uniform 1/k' (k' = k, or the non-empty count under skip_empty) or
/// class-size weights n_j / n under size_weighted.
std::vector<double> class_weights(const Partition& part, const RateParams& params);

}  // namespace ldr::rate
