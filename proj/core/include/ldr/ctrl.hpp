#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ldr/rate.hpp"
#include "ldr/types.hpp"

namespace ldr::ctrl {

using rate::RateParams;

/// Utility components of one game state: dR(Z), dR(Zhat) and the pairwise
/// term dR(Z, Zhat).
struct UtilityBreakdown {
  double dR_Z = 0.0;
  double dR_Zhat = 0.0;
  double dR_pair = 0.0;
  double total() const { return dR_Z + dR_Zhat + dR_pair; }
};

struct RoundRecord {
  int round = 0;
  double dR_Z = 0.0;
  double dR_Zhat = 0.0;
  double dR_pair = 0.0;
  double constraint_residual = 0.0;
  // Phase-boundary utilities; used by the monotonicity checks, not part of
  // the CSV contract.
  double utility_before = 0.0;
  double utility_after_g = 0.0;
  double utility_after_f = 0.0;
};

/// Linear encoder/decoder pair of the transcription game. Rows of f stay
/// orthonormal (restored by retraction after every f update).
struct TranscriptionState {
  Matrix f;  // d x D
  Matrix g;  // D x d
  int iter = 0;
  std::vector<RoundRecord> history;

  Index feature_dim() const { return f.rows(); }
  Index data_dim() const { return f.cols(); }
};

struct GameConfig {
  Index feature_dim = 8;  // d; must stay below the data dimension D
  int rounds = 80;
  int steps_f = 2;
  int steps_g = 2;
  double lr_f = 0.5;
  double lr_g = 0.5;
  double rho = 0.0;  // penalty weight for the incremental constraint
  RateParams params{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Thrown when the game utility leaves the finite range; carries the last
/// state that still evaluated cleanly.
class TranscriptionDiverged : public Error {
 public:
  TranscriptionDiverged(std::string what, TranscriptionState last_good_state)
      : Error(std::move(what)), last_good(std::move(last_good_state)) {}
  TranscriptionState last_good;
};

/// f from the QR of a seeded Gaussian (orthonormal rows, deterministic sign
/// convention); g = f^T, so the loop starts exactly self-consistent.
TranscriptionState init_state(Index feature_dim, Index data_dim, std::uint64_t seed);

/// Z = normalize_columns(f X). A zero column (x in the null space of f)
/// raises DegenerateInput.
Matrix encode(const TranscriptionState& state, const Matrix& X);

/// Xhat = g Z; plain linear lifting, no normalization.
Matrix decode(const TranscriptionState& state, const Matrix& Z);

/// Z = encode(X), Zhat = encode(decode(Z));
/// returns dR(Z) + dR(Zhat) + dR(Z, Zhat) with its components.
UtilityBreakdown game_utility(const TranscriptionState& state, const Matrix& X,
                              const Partition& part, const RateParams& params);

/// dR(Z_ref, encode(decode(Z_ref))): zero iff the stored features are a
/// fixed point of the loop.
double fixed_point_residual(const TranscriptionState& state, const Matrix& Z_ref,
                            const RateParams& params);

/// Alternating sequential game: per round, g takes steps_g line-searched
/// descent steps on the utility, then f takes steps_f ascent steps with an
/// orthonormal-row retraction after every step. Deterministic given
/// cfg.seed. Non-finite utility raises TranscriptionDiverged.
TranscriptionState train_transcription(const Matrix& X, const Partition& part,
                                       const GameConfig& cfg);

/// Constrained incremental game on new data: the objective of
/// train_transcription on (X_new, part_new) plus the penalty
/// rho * dR(Z_old, encode(decode(Z_old))). g minimizes utility + rho *
/// residual, f maximizes utility - rho * residual, so both players press
/// the old-class memory toward a loop fixed point. With rho = 0 or an empty
/// Z_old the trajectory is identical to train_transcription started from
/// `state`.
TranscriptionState incremental_step(const TranscriptionState& state, const Matrix& X_new,
                                    const Matrix& Z_old, const GameConfig& cfg,
                                    const std::optional<Partition>& part_new = std::nullopt);

/// Gradients of the three-term utility with respect to f and g; exposed for
/// the finite-difference tests.
struct GameGradients {
  Matrix d_f;
  Matrix d_g;
};
GameGradients game_utility_gradients(const TranscriptionState& state, const Matrix& X,
                                     const Partition& part, const RateParams& params);

/// Row-orthonormalization via QR of f^T with a positive-diagonal sign fix.
Matrix orthonormalize_rows(const Matrix& f);

}  // namespace ldr::ctrl
