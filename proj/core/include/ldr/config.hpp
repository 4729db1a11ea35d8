#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldr/datagen.hpp"
#include "ldr/rate.hpp"
#include "ldr/types.hpp"

namespace ldr::cli {

enum class ExperimentKind {
  Redunet,
  Spectral,
  Ctrl,
  CtrlIncremental,
  AttentionProfile,
  Bench,
};

std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& name);

/// Dataset section; `type` selects which of the optional groups applies.
struct DatasetConfig {
  std::string type = "subspace_mixture";  // subspace_mixture | nonlinear | signal_classes |
                                          // shift_orbit | file

  // subspace_mixture
  Index ambient_dim = 8;
  std::vector<data::ClassSpec> classes;
  std::optional<double> min_principal_angle_deg{};
  std::uint64_t basis_seed = 7;

  // nonlinear
  std::string manifold = "circles";  // circles | helix | moons
  Index samples = 200;
  double noise = 0.0;

  // signal_classes / shift_orbit
  Index channels = 2;
  Index taps = 8;
  Index num_classes = 3;        // signal_classes
  Index samples_per_class = 6;  // signal_classes
  Index num_signals = 6;        // shift_orbit
  Index smooth_taps = 3;
  double signal_noise = 1e-2;

  // file
  std::string path;
};

struct RedunetSection {
  int layers = 30;
  double eta = 0.5;
  double lambda = 1.0;
  double epsilon = 0.5;
};

struct SpectralSection {
  int layers = 30;
  double eta = 0.5;
  double lambda = 1.0;
  double epsilon = 0.5;
};

struct AttentionSection {
  Index dim = 8;
  Index samples = 32;
  double alpha_lmax_min = 1e-3;
  double alpha_lmax_max = 0.1;
  int grid = 20;
};

struct CtrlSection {
  Index feature_dim = 8;
  int rounds = 80;
  int steps_f = 2;
  int steps_g = 2;
  double lr_f = 0.5;
  double lr_g = 0.5;
  double rho = 10.0;  // used by ctrl-incremental
  double epsilon = 0.5;
  int incremental_rounds = 80;  // rounds of the incremental phase
};

struct BenchSection {
  std::vector<Index> taps = {512, 1024};
  Index channels = 2;
  int reps = 25;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Redunet;
  std::uint64_t seed = 0;
  std::string out_dir;  // resolved against LDRK_OUT_DIR / ./runs when empty
  int threads = 1;
  DatasetConfig dataset;
  RedunetSection redunet;
  SpectralSection spectral;
  AttentionSection attention;
  CtrlSection ctrl;
  BenchSection bench;
};

/// Fully-defaulted config for a kind (the value a {kind, seed}-only file
/// parses to).
ExperimentConfig default_config(ExperimentKind kind);

/// Strict parse: unknown keys and out-of-range values raise ConfigError
/// with a path-qualified message; defaults are materialized.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical JSON (sorted keys, defaults materialized); reparsing yields an
/// equal config.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64 hash of the canonical serialization, as 16 hex chars.
std::string config_hash(const ExperimentConfig& config);

/// Resolved output directory: config.out_dir, else $LDRK_OUT_DIR/<kind>,
/// else ./runs/<kind>.
std::filesystem::path resolve_out_dir(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace ldr::cli
