#include "ldr/ctrl.hpp"

#include <Eigen/QR>
#include <cmath>

#include "ldr/rng.hpp"

namespace ldr::ctrl {

namespace {

// Backprop through per-column sphere normalization z = v / ||v||:
// dL/dv = (dL/dz - z (z . dL/dz)) / ||v||.
Matrix normalize_backprop(const Matrix& upstream, const Matrix& pre, const Matrix& post) {
  Matrix out(upstream.rows(), upstream.cols());
  for (Index i = 0; i < upstream.cols(); ++i) {
    const double norm = pre.col(i).norm();
    const double along = post.col(i).dot(upstream.col(i));
    out.col(i) = (upstream.col(i) - post.col(i) * along) / norm;
  }
  return out;
}

struct LoopForward {
  Matrix V, Z, Xhat, W, Zhat;
  UtilityBreakdown ub;
};

LoopForward loop_forward(const Matrix& f, const Matrix& g, const Matrix& X,
                         const Partition& part, const RateParams& params) {
  LoopForward fw;
  fw.V = f * X;
  fw.Z = normalize_columns(fw.V);
  fw.Xhat = g * fw.Z;
  fw.W = f * fw.Xhat;
  fw.Zhat = normalize_columns(fw.W);
  fw.ub.dR_Z = rate::rate_reduction(fw.Z, part, params);
  fw.ub.dR_Zhat = rate::rate_reduction(fw.Zhat, part, params);
  fw.ub.dR_pair = rate::pairwise_rate_reduction(fw.Z, fw.Zhat, params);
  return fw;
}

// Gradients of the three-term utility through the closed loop; f enters
// twice (encoding X and re-encoding Xhat), both contributions accumulate.
GameGradients loop_gradients(const Matrix& f, const Matrix& g, const Matrix& X,
                             const Partition& part, const RateParams& params) {
  const LoopForward fw = loop_forward(f, g, X, part, params);
  const auto pair = rate::pairwise_rate_reduction_gradients(fw.Z, fw.Zhat, params);

  const Matrix gZ_direct = rate::rate_reduction_gradient(fw.Z, part, params) + pair.d_Z;
  const Matrix gZhat = rate::rate_reduction_gradient(fw.Zhat, part, params) + pair.d_Zhat;

  const Matrix gW = normalize_backprop(gZhat, fw.W, fw.Zhat);
  GameGradients out;
  out.d_f = gW * fw.Xhat.transpose();
  const Matrix gXhat = f.transpose() * gW;
  out.d_g = gXhat * fw.Z.transpose();
  const Matrix gZ_total = gZ_direct + g.transpose() * gXhat;
  const Matrix gV = normalize_backprop(gZ_total, fw.V, fw.Z);
  out.d_f += gV * X.transpose();
  return out;
}

// Penalty term res = dR(Z_old, encode(decode(Z_old))) and its gradients;
// Z_old is a stored constant.
struct PenaltyEval {
  double residual = 0.0;
  Matrix d_f, d_g;
};

double penalty_residual(const Matrix& f, const Matrix& g, const Matrix& Z_old,
                        const RateParams& params) {
  const Matrix W = f * (g * Z_old);
  return rate::pairwise_rate_reduction(Z_old, normalize_columns(W), params);
}

PenaltyEval penalty_gradients(const Matrix& f, const Matrix& g, const Matrix& Z_old,
                              const RateParams& params) {
  PenaltyEval out;
  const Matrix lifted = g * Z_old;
  const Matrix W = f * lifted;
  const Matrix Zhat_old = normalize_columns(W);
  out.residual = rate::pairwise_rate_reduction(Z_old, Zhat_old, params);
  const auto pair = rate::pairwise_rate_reduction_gradients(Z_old, Zhat_old, params);
  const Matrix gW = normalize_backprop(pair.d_Zhat, W, Zhat_old);
  out.d_f = gW * lifted.transpose();
  out.d_g = f.transpose() * gW * Z_old.transpose();
  return out;
}

}  // namespace

void GameConfig::validate() const {
  if (feature_dim < 1) throw DegenerateInput("GameConfig: feature_dim must be >= 1");
  if (rounds < 0) throw DegenerateInput("GameConfig: rounds must be >= 0");
  if (steps_f < 1 || steps_g < 1) throw DegenerateInput("GameConfig: step counts must be >= 1");
  if (!(lr_f > 0.0) || !(lr_g > 0.0)) throw DegenerateInput("GameConfig: learning rates must be positive");
  if (rho < 0.0) throw DegenerateInput("GameConfig: rho must be >= 0");
}

Matrix orthonormalize_rows(const Matrix& f) {
  const Index d = f.rows();
  const Index D = f.cols();
  if (d > D) throw ShapeError("orthonormalize_rows: more rows than columns");
  Eigen::HouseholderQR<Matrix> qr(f.transpose());
  Matrix Q = qr.householderQ() * Matrix::Identity(D, d);
  const Matrix R = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q.transpose();
}

TranscriptionState init_state(Index feature_dim, Index data_dim, std::uint64_t seed) {
  if (feature_dim < 1 || data_dim < 1) throw DegenerateInput("init_state: dims must be >= 1");
  if (feature_dim >= data_dim) {
    throw DegenerateInput("init_state: feature dim must be below the data dim");
  }
  Rng rng(seed);
  TranscriptionState state;
  state.f = orthonormalize_rows(rng.gaussian_matrix(feature_dim, data_dim));
  state.g = state.f.transpose();
  return state;
}

Matrix encode(const TranscriptionState& state, const Matrix& X) {
  if (X.rows() != state.data_dim()) throw ShapeError("encode: data dimension mismatch");
  require_finite(X, "encode input");
  return normalize_columns(state.f * X);
}

Matrix decode(const TranscriptionState& state, const Matrix& Z) {
  if (Z.rows() != state.feature_dim()) throw ShapeError("decode: feature dimension mismatch");
  require_finite(Z, "decode input");
  return state.g * Z;
}

UtilityBreakdown game_utility(const TranscriptionState& state, const Matrix& X,
                              const Partition& part, const RateParams& params) {
  if (X.rows() != state.data_dim()) throw ShapeError("game_utility: data dimension mismatch");
  part.validate(X.cols());
  return loop_forward(state.f, state.g, X, part, params).ub;
}

double fixed_point_residual(const TranscriptionState& state, const Matrix& Z_ref,
                            const RateParams& params) {
  if (Z_ref.cols() == 0) return 0.0;
  return rate::pairwise_rate_reduction(Z_ref, encode(state, decode(state, Z_ref)), params);
}

GameGradients game_utility_gradients(const TranscriptionState& state, const Matrix& X,
                                     const Partition& part, const RateParams& params) {
  part.validate(X.cols());
  return loop_gradients(state.f, state.g, X, part, params);
}

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kAcceptSlack = 1e-12;

struct GameEngine {
  const Matrix& X;
  const Partition& part;
  const Matrix& Z_old;
  const GameConfig& cfg;
  bool has_penalty;

  double utility(const Matrix& f, const Matrix& g) const {
    return loop_forward(f, g, X, part, cfg.params).ub.total();
  }

  double residual(const Matrix& f, const Matrix& g) const {
    return has_penalty ? penalty_residual(f, g, Z_old, cfg.params) : 0.0;
  }

  // Objective each player optimizes: g minimizes U + rho res, f maximizes
  // U - rho res; both directions press the residual down.
  double g_objective(const Matrix& f, const Matrix& g) const {
    return utility(f, g) + cfg.rho * residual(f, g);
  }
  double f_objective(const Matrix& f, const Matrix& g) const {
    return utility(f, g) - cfg.rho * residual(f, g);
  }

  // One backtracking descent step on g. Candidates that fail to evaluate
  // (zero encode column, non-SPD) are treated as rejected steps.
  void g_step(TranscriptionState& state) const {
    const auto grads = loop_gradients(state.f, state.g, X, part, cfg.params);
    Matrix direction = grads.d_g;
    if (has_penalty && cfg.rho != 0.0) {
      direction += cfg.rho * penalty_gradients(state.f, state.g, Z_old, cfg.params).d_g;
    }
    const double base = g_objective(state.f, state.g);
    double step = cfg.lr_g;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      const Matrix candidate = state.g - step * direction;
      double value;
      try {
        value = g_objective(state.f, candidate);
      } catch (const Error&) {
        continue;
      }
      if (std::isfinite(value) && value <= base + kAcceptSlack) {
        state.g = candidate;
        return;
      }
    }
    // No improving step at any scale: keep g (phase stays monotone).
  }

  // One backtracking ascent step on f with orthonormal-row retraction.
  void f_step(TranscriptionState& state) const {
    auto grads = loop_gradients(state.f, state.g, X, part, cfg.params);
    Matrix direction = grads.d_f;
    if (has_penalty && cfg.rho != 0.0) {
      direction -= cfg.rho * penalty_gradients(state.f, state.g, Z_old, cfg.params).d_f;
    }
    const double base = f_objective(state.f, state.g);
    double step = cfg.lr_f;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      Matrix candidate;
      double value;
      try {
        candidate = orthonormalize_rows(state.f + step * direction);
        value = f_objective(candidate, state.g);
      } catch (const Error&) {
        continue;
      }
      if (std::isfinite(value) && value >= base - kAcceptSlack) {
        state.f = candidate;
        return;
      }
    }
  }

  TranscriptionState run(TranscriptionState state) const {
    for (int round = 0; round < cfg.rounds; ++round) {
      RoundRecord rec;
      rec.round = state.iter + 1;
      rec.utility_before = utility(state.f, state.g);
      if (!std::isfinite(rec.utility_before)) {
        throw TranscriptionDiverged("game utility became non-finite", state);
      }

      for (int s = 0; s < cfg.steps_g; ++s) g_step(state);
      rec.utility_after_g = utility(state.f, state.g);

      for (int s = 0; s < cfg.steps_f; ++s) f_step(state);
      rec.utility_after_f = utility(state.f, state.g);

      const auto ub = loop_forward(state.f, state.g, X, part, cfg.params).ub;
      rec.dR_Z = ub.dR_Z;
      rec.dR_Zhat = ub.dR_Zhat;
      rec.dR_pair = ub.dR_pair;
      rec.constraint_residual = residual(state.f, state.g);
      if (!std::isfinite(ub.total())) {
        throw TranscriptionDiverged("game utility became non-finite", state);
      }
      state.history.push_back(rec);
      ++state.iter;
    }
    return state;
  }
};

}  // namespace

TranscriptionState train_transcription(const Matrix& X, const Partition& part,
                                       const GameConfig& cfg) {
  cfg.validate();
  require_finite(X, "train_transcription data");
  part.validate(X.cols());
  TranscriptionState state = init_state(cfg.feature_dim, X.rows(), cfg.seed);
  const Matrix no_memory(cfg.feature_dim, 0);
  GameEngine engine{X, part, no_memory, cfg, /*has_penalty=*/false};
  return engine.run(std::move(state));
}

TranscriptionState incremental_step(const TranscriptionState& state, const Matrix& X_new,
                                    const Matrix& Z_old, const GameConfig& cfg,
                                    const std::optional<Partition>& part_new) {
  cfg.validate();
  require_finite(X_new, "incremental_step data");
  const Partition part = part_new ? *part_new : Partition::single_class(X_new.cols());
  part.validate(X_new.cols());
  if (Z_old.cols() > 0 && Z_old.rows() != state.feature_dim()) {
    throw ShapeError("incremental_step: Z_old feature dimension mismatch");
  }
  GameEngine engine{X_new, part, Z_old, cfg, Z_old.cols() > 0};
  return engine.run(state);
}

}  // namespace ldr::ctrl
