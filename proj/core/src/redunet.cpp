#include "ldr/redunet.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ldr/parallel.hpp"

namespace ldr::redunet {

namespace {

// Resolvent alpha (I + alpha Cov)^{-1} from a feature block; symmetrized to
// keep the SPD layer invariant exact at float precision.
Matrix resolvent(const Matrix& Z, double alpha) {
  const Index d = Z.rows();
  const Matrix G = Matrix::Identity(d, d) + alpha * (Z * Z.transpose());
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) throw InvalidMatrix("resolvent: factorization failed");
  Matrix M = alpha * llt.solve(Matrix::Identity(d, d));
  return 0.5 * (M + M.transpose());
}

}  // namespace

Matrix expansion_operator(const Matrix& Z, double alpha) {
  require_finite(Z, "expansion_operator input");
  if (!(alpha > 0.0)) throw DegenerateInput("expansion_operator: alpha must be positive");
  return resolvent(Z, alpha);
}

std::vector<Matrix> compression_operators(const Matrix& Z, const Partition& part,
                                          const RateParams& params) {
  part.validate(Z.cols());
  require_finite(Z, "compression_operators input");
  const Index d = Z.rows();
  const auto members = part.members();
  std::vector<Matrix> ops(static_cast<std::size_t>(part.k));
  for (int j = 0; j < part.k; ++j) {
    const auto& cols = members[static_cast<std::size_t>(j)];
    if (cols.empty()) {
      // n = 1 convention: the resolvent of a zero covariance.
      ops[static_cast<std::size_t>(j)] =
          rate::alpha_for(params, d, 1) * Matrix::Identity(d, d);
      continue;
    }
    const Matrix Zj = select_columns(Z, cols);
    const double alpha_j = rate::alpha_for(params, d, static_cast<Index>(cols.size()));
    ops[static_cast<std::size_t>(j)] = resolvent(Zj, alpha_j);
  }
  return ops;
}

Vector soft_assignment(const Vector& z, std::span<const Matrix> C, double lambda) {
  const auto k = static_cast<Index>(C.size());
  if (k == 0) throw DegenerateInput("soft_assignment: no compression operators");
  if (!(lambda > 0.0)) throw DegenerateInput("soft_assignment: lambda must be positive");

  Vector score(k);
  for (Index j = 0; j < k; ++j) {
    score(j) = -lambda * (C[static_cast<std::size_t>(j)] * z).norm();
  }
  const double m = score.maxCoeff();
  Vector pi = (score.array() - m).exp();
  pi /= pi.sum();
  return pi;
}

Vector layer_forward(const Vector& z, const ReduLayer& layer) {
  if (z.norm() == 0.0) throw DegenerateInput("layer_forward: zero input vector");
  const auto k = static_cast<Index>(layer.C.size());
  const Vector pi = soft_assignment(z, layer.C, layer.lambda);

  Vector update = layer.E * z;
  for (Index j = 0; j < k; ++j) {
    update -= (pi(j) / static_cast<double>(k)) * (layer.C[static_cast<std::size_t>(j)] * z);
  }
  Vector out = z + layer.eta * update;
  const double norm = out.norm();
  if (norm == 0.0) throw DegenerateInput("layer_forward: update annihilated the feature");
  return out / norm;
}

Matrix layer_forward_batch(const Matrix& Z, const ReduLayer& layer, int threads) {
  Matrix out(Z.rows(), Z.cols());
  parallel_for(Z.cols(), threads,
               [&](Index i) { out.col(i) = layer_forward(Z.col(i), layer); });
  return out;
}

Matrix layer_forward_supervised(const Matrix& Z, const ReduLayer& layer, const Partition& part,
                                int threads) {
  part.validate(Z.cols());
  const auto k = static_cast<Index>(layer.C.size());
  if (k != part.k) throw ShapeError("layer_forward_supervised: operator count vs partition k");
  Matrix out(Z.rows(), Z.cols());
  parallel_for(Z.cols(), threads, [&](Index i) {
    const auto j = static_cast<std::size_t>(part.class_of[static_cast<std::size_t>(i)]);
    const Vector z = Z.col(i);
    if (z.norm() == 0.0) throw DegenerateInput("layer_forward_supervised: zero column");
    Vector v = z + layer.eta * (layer.E * z - (layer.C[j] * z) / static_cast<double>(k));
    const double norm = v.norm();
    if (norm == 0.0) throw DegenerateInput("layer_forward_supervised: zero update");
    out.col(i) = v / norm;
  });
  return out;
}

Matrix class_subspace_basis(const Matrix& Zj, Index d, int k, double rel_threshold) {
  Eigen::JacobiSVD<Matrix> svd(Zj, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) throw DegenerateInput("class features have rank 0");
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= rel_threshold * sv(0)) ++rank;
  }
  const Index cap = std::max<Index>(1, d / std::max(k, 1));
  rank = std::clamp<Index>(rank, 1, std::min(cap, sv.size()));
  return svd.matrixU().leftCols(rank);
}

ReduNetModel build_redunet(const Matrix& X, const Partition& part, const BuildConfig& cfg) {
  part.validate(X.cols());
  require_finite(X, "build_redunet input");
  if (cfg.num_layers < 1) throw DegenerateInput("build_redunet: need at least one layer");
  if (!(cfg.eta >= 0.0)) throw DegenerateInput("build_redunet: eta must be >= 0");
  if (!(cfg.lambda > 0.0)) throw DegenerateInput("build_redunet: lambda must be positive");
  if (!has_unit_columns(X, 1e-6)) {
    throw DegenerateInput("build_redunet: input columns must be unit-norm");
  }

  ReduNetModel model;
  model.d = X.rows();
  model.k = part.k;
  model.params = cfg.params;
  model.eta = cfg.eta;
  model.lambda = cfg.lambda;
  model.layers.reserve(static_cast<std::size_t>(cfg.num_layers));

  Matrix Z = X;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const double alpha = rate::alpha_for(cfg.params, Z.rows(), Z.cols());
    ReduLayer layer;
    layer.E = expansion_operator(Z, alpha);
    layer.C = compression_operators(Z, part, cfg.params);
    layer.eta = cfg.eta;
    layer.lambda = cfg.lambda;
    Z = layer_forward_supervised(Z, layer, part, cfg.threads);
    model.layers.push_back(std::move(layer));
  }

  const auto members = part.members();
  model.class_subspaces.reserve(static_cast<std::size_t>(part.k));
  for (int j = 0; j < part.k; ++j) {
    const auto& cols = members[static_cast<std::size_t>(j)];
    if (cols.empty()) {
      model.class_subspaces.emplace_back(Matrix::Zero(model.d, 0));
      continue;
    }
    model.class_subspaces.push_back(class_subspace_basis(select_columns(Z, cols), model.d, part.k));
  }
  return model;
}

ForwardRecord forward(const ReduNetModel& model, const Matrix& X, int threads) {
  require_finite(X, "forward input");
  if (X.rows() != model.d) throw ShapeError("forward: feature dimension mismatch");
  if (!has_unit_columns(X, 1e-6)) throw DegenerateInput("forward: input columns must be unit-norm");

  ForwardRecord rec;
  rec.features = X;
  rec.assignments.reserve(model.layers.size());
  for (const auto& layer : model.layers) {
    Matrix pis(static_cast<Index>(layer.C.size()), X.cols());
    Matrix next(X.rows(), X.cols());
    parallel_for(rec.features.cols(), threads, [&](Index i) {
      pis.col(i) = soft_assignment(rec.features.col(i), layer.C, layer.lambda);
      next.col(i) = layer_forward(rec.features.col(i), layer);
    });
    rec.features = std::move(next);
    rec.assignments.push_back(std::move(pis));
  }
  return rec;
}

int classify_input(const ReduNetModel& model, const Vector& x) {
  Matrix one = x;
  const auto rec = forward(model, one);
  return nearest_subspace_classify(model, rec.features.col(0));
}

int nearest_subspace_classify(const ReduNetModel& model, const Vector& z) {
  if (model.class_subspaces.empty()) throw DegenerateInput("model has no class subspaces");
  int best = 0;
  double best_score = -1.0;
  for (int j = 0; j < static_cast<int>(model.class_subspaces.size()); ++j) {
    const Matrix& U = model.class_subspaces[static_cast<std::size_t>(j)];
    const double score = U.cols() > 0 ? (U.transpose() * z).squaredNorm() : 0.0;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

std::vector<RateTraceRow> layer_rate_trace(const ReduNetModel& model, const Matrix& X,
                                           const Partition& part) {
  part.validate(X.cols());
  std::vector<RateTraceRow> rows;
  rows.reserve(model.layers.size() + 1);

  Matrix Z = X;
  const auto record = [&](int layer_index) {
    RateTraceRow row;
    row.layer = layer_index;
    row.R = rate::coding_rate(Z, rate::alpha_for(model.params, Z.rows(), Z.cols()));
    row.Rc = rate::class_rate_average(Z, part, model.params);
    row.dR = row.R - row.Rc;
    rows.push_back(row);
  };

  record(0);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Z = layer_forward_supervised(Z, model.layers[l], part);
    record(static_cast<int>(l) + 1);
  }
  return rows;
}

}  // namespace ldr::redunet
