#pragma once

#include <span>
#include <vector>

#include "ldr/types.hpp"

namespace ldr::attention {

/// Learnable transforms of one self-attention head plus the rate scaling.
struct AttentionLayer {
  Matrix U_o, U_v, U_k, U_q;
  double alpha = 1.0;
};

/// First-order expansion of the rate-distortion gradient:
/// alpha (Z - alpha Z (Z^T Z)). No linear solve; O(d n^2).
Matrix approx_rate_gradient(const Matrix& Z, double alpha);

/// Z' = Z + U_o [Z - alpha U_v Z (U_k Z)^T (U_q Z)]; the printed linear
/// attention form, no softmax and no normalization.
Matrix attention_layer_forward(const Matrix& Z, const AttentionLayer& layer);

/// Multiple heads in parallel, summed after each head's U_o:
/// Z' = Z + sum_h U_o^h [ ... ]. One head reduces to attention_layer_forward.
Matrix multi_head_forward(const Matrix& Z, std::span<const AttentionLayer> heads);

struct ErrorProfilePoint {
  double alpha_lmax = 0.0;  // alpha * lambda_max(Z Z^T)
  double rel_err = 0.0;     // ||exact - approx||_F / ||exact||_F
};

/// Relative error of approx_rate_gradient against the exact resolvent
/// gradient over a grid of alphas, keyed by alpha * lambda_max.
std::vector<ErrorProfilePoint> approximation_error_profile(const Matrix& Z,
                                                           std::span<const double> alphas);

}  // namespace ldr::attention
