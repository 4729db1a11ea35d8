#pragma once

#include <filesystem>
#include <iosfwd>

#include "ldr/config.hpp"
#include "ldr/dataset_io.hpp"
#include "ldr/datagen.hpp"

namespace ldr::cli {

/// A dataset in the form the experiment needs: dense features always, plus
/// the signal view for the spectral kinds.
struct MaterializedData {
  io::Dataset dense;
  std::vector<spectral::MultiChannelSignal> signals;
  Partition signal_part;
  std::vector<Matrix> bases;  // ground-truth subspaces when generated
  bool is_signals = false;
};

/// Deterministic in (dataset config, seed); `seed` drives samples/noise
/// while basis_seed pins subspaces and base signals, so holdout draws share
/// the ground truth.
MaterializedData materialize_dataset(const DatasetConfig& ds, std::uint64_t seed);

/// gen-data: writes dataset.csv and dataset.bin into the output directory.
int run_generate(const ExperimentConfig& config);

/// Dispatches on config.kind, writes the experiment's artifacts plus
/// manifest.json. Returns 0 on success, 2 on numerical divergence.
int run_experiment(const ExperimentConfig& config);

/// eval: classify a dataset file with a stored model, write metrics.csv.
int run_eval(const std::filesystem::path& model_path, const std::filesystem::path& data_path,
             const std::filesystem::path& out_dir, int threads);

/// report: deterministic text table of a run directory's metrics.
int run_report(const std::filesystem::path& run_dir, std::ostream& os);

}  // namespace ldr::cli
