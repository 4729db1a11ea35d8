#include "ldr/attention.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "ldr/rate.hpp"

namespace ldr::attention {

namespace {

void check_square(const Matrix& U, Index d, const char* name) {
  if (U.rows() != d || U.cols() != d) {
    throw ShapeError(std::string(name) + " must be d x d for d-dimensional features");
  }
}

Matrix head_update(const Matrix& Z, const AttentionLayer& layer) {
  const Index d = Z.rows();
  check_square(layer.U_o, d, "U_o");
  check_square(layer.U_v, d, "U_v");
  check_square(layer.U_k, d, "U_k");
  check_square(layer.U_q, d, "U_q");
  // (U_k Z)^T (U_q Z) is the n x n self-attention matrix.
  const Matrix attn = (layer.U_k * Z).transpose() * (layer.U_q * Z);
  return layer.U_o * (Z - layer.alpha * (layer.U_v * Z) * attn);
}

}  // namespace

Matrix approx_rate_gradient(const Matrix& Z, double alpha) {
  require_finite(Z, "approx_rate_gradient input");
  if (!(alpha > 0.0)) throw DegenerateInput("approx_rate_gradient: alpha must be positive");
  return alpha * (Z - alpha * Z * (Z.transpose() * Z));
}

Matrix attention_layer_forward(const Matrix& Z, const AttentionLayer& layer) {
  require_finite(Z, "attention_layer_forward input");
  return Z + head_update(Z, layer);
}

Matrix multi_head_forward(const Matrix& Z, std::span<const AttentionLayer> heads) {
  require_finite(Z, "multi_head_forward input");
  if (heads.empty()) throw DegenerateInput("multi_head_forward: no heads");
  Matrix out = Z;
  for (const auto& head : heads) out += head_update(Z, head);
  return out;
}

std::vector<ErrorProfilePoint> approximation_error_profile(const Matrix& Z,
                                                           std::span<const double> alphas) {
  require_finite(Z, "approximation_error_profile input");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Z * Z.transpose());
  const double lmax = eig.eigenvalues().size() > 0 ? eig.eigenvalues().maxCoeff() : 0.0;

  std::vector<ErrorProfilePoint> points;
  points.reserve(alphas.size());
  for (double alpha : alphas) {
    const Matrix exact = rate::rate_gradient(Z, alpha);
    const Matrix approx = approx_rate_gradient(Z, alpha);
    ErrorProfilePoint p;
    p.alpha_lmax = alpha * lmax;
    const double denom = exact.norm();
    p.rel_err = denom > 0.0 ? (exact - approx).norm() / denom : 0.0;
    points.push_back(p);
  }
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.alpha_lmax < b.alpha_lmax; });
  return points;
}

}  // namespace ldr::attention
