#pragma once

#include <filesystem>
#include <span>

#include "ldr/ctrl.hpp"
#include "ldr/redunet.hpp"
#include "ldr/spectral.hpp"

namespace ldr::io {

/// Versioned JSON model documents. The dense model document is
/// {version, d, k, epsilon, eta, lambda, layers:[{E, C}], class_subspaces}
/// with E stored as a flat row-major array and C as a list of such arrays;
/// a fixed-alpha convention adds an optional "fixed_alpha" key.
void save_redunet(const std::filesystem::path& path, const redunet::ReduNetModel& model);
redunet::ReduNetModel load_redunet(const std::filesystem::path& path);

void save_spectral(const std::filesystem::path& path, const spectral::SpectralReduNetModel& model);
spectral::SpectralReduNetModel load_spectral(const std::filesystem::path& path);

void save_transcription(const std::filesystem::path& path, const ctrl::TranscriptionState& state,
                        const rate::RateParams& params);
struct LoadedTranscription {
  ctrl::TranscriptionState state;
  rate::RateParams params;
};
LoadedTranscription load_transcription(const std::filesystem::path& path);

/// Rate trace CSV with header `layer,R,Rc,dR`.
void write_rate_trace_csv(const std::filesystem::path& path,
                          std::span<const redunet::RateTraceRow> rows);

/// Game history CSV with header
/// `round,dR_Z,dR_Zhat,dR_pair,constraint_residual`.
void write_game_history_csv(const std::filesystem::path& path,
                            std::span<const ctrl::RoundRecord> rows);

}  // namespace ldr::io
