#include "ldr/rate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

namespace ldr::rate {

namespace {

constexpr double kMinEpsilon = 1e-6;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DegenerateInput("alpha must be positive and finite");
  }
}

// log det of an SPD matrix through its Cholesky factor.
double spd_log_det(const Matrix& G) {
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) {
    throw InvalidMatrix("Cholesky factorization failed (matrix not SPD)");
  }
  double log_det = 0.0;
  const auto& L = llt.matrixLLT();
  for (Index i = 0; i < G.rows(); ++i) log_det += std::log(L(i, i));
  return 2.0 * log_det;
}

}  // namespace

double alpha_for(const RateParams& params, Index d, Index n) {
  if (n <= 0) throw DegenerateInput("alpha_for: n must be >= 1");
  if (d <= 0) throw DegenerateInput("alpha_for: d must be >= 1");
  if (params.fixed_alpha) {
    const double a = *params.fixed_alpha;
    check_alpha(a);
    return a;
  }
  if (!(params.epsilon >= kMinEpsilon)) {
    throw DegenerateInput("epsilon below 1e-6 rejected (alpha overflow)");
  }
  return static_cast<double>(d) /
         (static_cast<double>(n) * params.epsilon * params.epsilon);
}

double coding_rate(const Matrix& Z, double alpha) {
  require_finite(Z, "coding_rate input");
  check_alpha(alpha);
  const Index d = Z.rows();
  const Index n = Z.cols();
  if (d == 0 || n == 0) return 0.0;

  // det(I_d + a Z Z^T) = det(I_n + a Z^T Z); factor the smaller side.
  Matrix G;
  if (n >= d) {
    G = Matrix::Identity(d, d) + alpha * (Z * Z.transpose());
  } else {
    G = Matrix::Identity(n, n) + alpha * (Z.transpose() * Z);
  }
  return 0.5 * spd_log_det(G);
}

std::vector<double> class_weights(const Partition& part, const RateParams& params) {
  const auto counts = part.counts();
  std::vector<double> w(static_cast<std::size_t>(part.k), 0.0);
  if (params.size_weighted) {
    Index total = 0;
    for (Index c : counts) total += c;
    if (total == 0) throw DegenerateInput("all classes empty");
    for (int j = 0; j < part.k; ++j) {
      w[static_cast<std::size_t>(j)] =
          static_cast<double>(counts[static_cast<std::size_t>(j)]) / static_cast<double>(total);
    }
    return w;
  }
  int denom = part.k;
  if (params.skip_empty) {
    denom = 0;
    for (Index c : counts) {
      if (c > 0) ++denom;
    }
    if (denom == 0) throw DegenerateInput("all classes empty");
  }
  for (int j = 0; j < part.k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0 || !params.skip_empty) {
      w[static_cast<std::size_t>(j)] = 1.0 / static_cast<double>(denom);
    }
  }
  return w;
}

double class_rate_average(const Matrix& Z, const Partition& part, const RateParams& params) {
  part.validate(Z.cols());
  const auto members = part.members();
  const auto weights = class_weights(part, params);
  double acc = 0.0;
  for (int j = 0; j < part.k; ++j) {
    const auto& cols = members[static_cast<std::size_t>(j)];
    if (cols.empty()) continue;  // empty class contributes rate 0
    const Matrix Zj = select_columns(Z, cols);
    const double alpha_j = alpha_for(params, Z.rows(), static_cast<Index>(cols.size()));
    acc += weights[static_cast<std::size_t>(j)] * coding_rate(Zj, alpha_j);
  }
  return acc;
}

double rate_reduction(const Matrix& Z, const Partition& part, const RateParams& params) {
  const double alpha = alpha_for(params, Z.rows(), Z.cols());
  return coding_rate(Z, alpha) - class_rate_average(Z, part, params);
}

Matrix rate_gradient(const Matrix& Z, double alpha) {
  require_finite(Z, "rate_gradient input");
  check_alpha(alpha);
  const Index d = Z.rows();
  const Index n = Z.cols();
  if (d == 0 || n == 0) return Matrix::Zero(d, n);

  if (d <= n) {
    const Matrix G = Matrix::Identity(d, d) + alpha * (Z * Z.transpose());
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success) throw InvalidMatrix("rate_gradient: solve failed");
    return alpha * llt.solve(Z);
  }
  // Push-through identity: (I + a Z Z^T)^{-1} Z = Z (I + a Z^T Z)^{-1}.
  const Matrix G = Matrix::Identity(n, n) + alpha * (Z.transpose() * Z);
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) throw InvalidMatrix("rate_gradient: solve failed");
  return alpha * llt.solve(Z.transpose()).transpose();
}

Matrix rate_reduction_gradient(const Matrix& Z, const Partition& part, const RateParams& params) {
  part.validate(Z.cols());
  const double alpha = alpha_for(params, Z.rows(), Z.cols());
  Matrix grad = rate_gradient(Z, alpha);

  const auto members = part.members();
  const auto weights = class_weights(part, params);
  for (int j = 0; j < part.k; ++j) {
    const auto& cols = members[static_cast<std::size_t>(j)];
    if (cols.empty()) continue;
    const Matrix Zj = select_columns(Z, cols);
    const double alpha_j = alpha_for(params, Z.rows(), static_cast<Index>(cols.size()));
    const Matrix Gj = rate_gradient(Zj, alpha_j);  // C^j Z_j
    const double w = weights[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < cols.size(); ++i) {
      grad.col(cols[i]) -= w * Gj.col(static_cast<Index>(i));
    }
  }
  return grad;
}

double pairwise_rate_reduction(const Matrix& Z, const Matrix& Zhat, const RateParams& params) {
  if (Z.rows() != Zhat.rows()) {
    throw ShapeError("pairwise_rate_reduction: feature dims " + std::to_string(Z.rows()) +
                     " vs " + std::to_string(Zhat.rows()));
  }
  const Index d = Z.rows();
  const Index n1 = Z.cols();
  const Index n2 = Zhat.cols();
  Matrix both(d, n1 + n2);
  both << Z, Zhat;
  const double alpha_u = alpha_for(params, d, n1 + n2);
  const double r_union = coding_rate(both, alpha_u);
  const double r_z = n1 > 0 ? coding_rate(Z, alpha_for(params, d, n1)) : 0.0;
  const double r_zhat = n2 > 0 ? coding_rate(Zhat, alpha_for(params, d, n2)) : 0.0;
  return r_union - 0.5 * (r_z + r_zhat);
}

PairwiseGradients pairwise_rate_reduction_gradients(const Matrix& Z, const Matrix& Zhat,
                                                    const RateParams& params) {
  if (Z.rows() != Zhat.rows()) throw ShapeError("pairwise gradients: feature dim mismatch");
  require_finite(Z, "pairwise gradient input");
  require_finite(Zhat, "pairwise gradient input");
  const Index d = Z.rows();
  const double alpha_u = alpha_for(params, d, Z.cols() + Zhat.cols());

  const Matrix G = Matrix::Identity(d, d) +
                   alpha_u * (Z * Z.transpose() + Zhat * Zhat.transpose());
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) throw InvalidMatrix("pairwise gradients: solve failed");

  PairwiseGradients out;
  out.d_Z = alpha_u * llt.solve(Z);
  out.d_Zhat = alpha_u * llt.solve(Zhat);
  if (Z.cols() > 0) {
    out.d_Z -= 0.5 * rate_gradient(Z, alpha_for(params, d, Z.cols()));
  }
  if (Zhat.cols() > 0) {
    out.d_Zhat -= 0.5 * rate_gradient(Zhat, alpha_for(params, d, Zhat.cols()));
  }
  return out;
}

}  // namespace ldr::rate
