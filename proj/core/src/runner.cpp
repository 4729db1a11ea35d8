#include "ldr/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ldr/attention.hpp"
#include "ldr/ctrl.hpp"
#include "ldr/metrics.hpp"
#include "ldr/model_io.hpp"
#include "ldr/redunet.hpp"
#include "ldr/rng.hpp"
#include "ldr/version.hpp"

namespace ldr::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using spectral::MultiChannelSignal;

constexpr std::uint64_t kHoldoutSalt = 0x486f6c646f757421ull;  // distinct sample stream

std::uint64_t holdout_seed(std::uint64_t seed) { return splitmix64(seed ^ kHoldoutSalt); }

// Ordered key/value metric rows; written as `key,value` CSV.
class MetricsWriter {
 public:
  void add(const std::string& key, double value) {
    rows_.emplace_back(key, io::format_double(value));
  }
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }

  void write(const fs::path& path) const {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << "metric,value\n";
    for (const auto& [k, v] : rows_) os << k << "," << v << "\n";
    if (!os) throw Error("failed writing " + path.string());
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

void write_manifest(const fs::path& out_dir, const ExperimentConfig& cfg, double wall_time_s) {
  json j;
  j["config"] = json::parse(serialize_config(cfg));
  j["config_hash"] = config_hash(cfg);
  j["versions"] = {{"ldrkit", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  j["wall_time_s"] = wall_time_s;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  j["finished_at"] = stamp.str();

  std::ofstream os(out_dir / "manifest.json");
  if (!os) throw Error("cannot write manifest.json");
  os << j.dump(2) << "\n";
}

data::SubspaceMixtureSpec mixture_spec(const DatasetConfig& ds) {
  data::SubspaceMixtureSpec spec;
  spec.ambient_dim = ds.ambient_dim;
  spec.classes = ds.classes;
  spec.basis_seed = ds.basis_seed;
  if (ds.min_principal_angle_deg) {
    spec.min_principal_angle = *ds.min_principal_angle_deg * std::numbers::pi / 180.0;
  }
  return spec;
}

std::vector<MultiChannelSignal> noisy_signal_variants(const MultiChannelSignal& base, Index count,
                                                      double sigma, Rng rng) {
  std::vector<MultiChannelSignal> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    Matrix v = base.values;
    if (sigma > 0.0) v += sigma * rng.gaussian_matrix(v.rows(), v.cols());
    const double norm = v.norm();
    if (norm == 0.0) throw DegenerateInput("noise annihilated a signal");
    out.emplace_back(Matrix(v / norm));
  }
  return out;
}

Matrix signals_to_columns(std::span<const MultiChannelSignal> signals) {
  if (signals.empty()) throw DegenerateInput("no signals");
  const Index d = signals.front().channels() * signals.front().taps();
  Matrix X(d, static_cast<Index>(signals.size()));
  for (std::size_t i = 0; i < signals.size(); ++i) {
    X.col(static_cast<Index>(i)) = spectral::vectorize(signals[i]);
  }
  return X;
}

}  // namespace

MaterializedData materialize_dataset(const DatasetConfig& ds, std::uint64_t seed) {
  MaterializedData out;
  if (ds.type == "subspace_mixture") {
    auto mix = data::sample_subspace_mixture(mixture_spec(ds), seed);
    out.dense.X = std::move(mix.X);
    out.dense.part = std::move(mix.part);
    out.bases = std::move(mix.bases);
  } else if (ds.type == "nonlinear") {
    data::ManifoldKind kind = data::ManifoldKind::Circles;
    if (ds.manifold == "helix") kind = data::ManifoldKind::Helix;
    if (ds.manifold == "moons") kind = data::ManifoldKind::MoonsOnSphere;
    auto [X, part] = data::sample_nonlinear_manifolds(kind, ds.samples, ds.noise, seed);
    out.dense.X = std::move(X);
    out.dense.part = std::move(part);
  } else if (ds.type == "signal_classes") {
    const auto bases = data::random_signals(ds.channels, ds.taps, ds.num_classes, 0.0,
                                            ds.basis_seed, ds.smooth_taps);
    Rng root(seed);
    std::vector<std::int32_t> labels;
    for (Index j = 0; j < ds.num_classes; ++j) {
      auto variants =
          noisy_signal_variants(bases[static_cast<std::size_t>(j)], ds.samples_per_class,
                                ds.signal_noise, root.stream(static_cast<std::uint64_t>(j)));
      for (auto& v : variants) {
        out.signals.push_back(std::move(v));
        labels.push_back(static_cast<std::int32_t>(j));
      }
    }
    out.signal_part = Partition(std::move(labels), static_cast<int>(ds.num_classes));
    out.is_signals = true;
    out.dense.X = signals_to_columns(out.signals);
    out.dense.part = out.signal_part;
  } else if (ds.type == "shift_orbit") {
    const auto bases = data::random_signals(ds.channels, ds.taps, ds.num_signals, 0.0,
                                            ds.basis_seed, ds.smooth_taps);
    Rng root(seed);
    std::vector<std::int32_t> labels;
    for (Index i = 0; i < ds.num_signals; ++i) {
      auto variants = noisy_signal_variants(bases[static_cast<std::size_t>(i)], 1, ds.signal_noise,
                                            root.stream(static_cast<std::uint64_t>(i)));
      out.signals.push_back(std::move(variants.front()));
      labels.push_back(static_cast<std::int32_t>(i));
    }
    // Self-supervised: every signal is its own class.
    out.signal_part = Partition(std::move(labels), static_cast<int>(ds.num_signals));
    out.is_signals = true;
    out.dense.X = signals_to_columns(out.signals);
    out.dense.part = out.signal_part;
  } else if (ds.type == "file") {
    const fs::path path = ds.path;
    if (path.extension() == ".bin") {
      out.dense = io::read_dataset_binary(path);
    } else {
      out.dense = io::read_dataset_csv(path);
    }
  } else {
    throw ConfigError("dataset.type: unknown dataset type '" + ds.type + "'");
  }
  return out;
}

int run_generate(const ExperimentConfig& cfg) {
  const fs::path out = resolve_out_dir(cfg);
  fs::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = materialize_dataset(cfg.dataset, cfg.seed);
  io::write_dataset_csv(out / "dataset.csv", data.dense);
  io::write_dataset_binary(out / "dataset.bin", data.dense);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out, cfg, wall);
  return 0;
}

namespace {

double classification_accuracy(const redunet::ReduNetModel& model, const Matrix& X,
                               const Partition& part) {
  const auto rec = redunet::forward(model, X);
  Index correct = 0;
  for (Index i = 0; i < X.cols(); ++i) {
    if (redunet::nearest_subspace_classify(model, rec.features.col(i)) ==
        part.class_of[static_cast<std::size_t>(i)]) {
      ++correct;
    }
  }
  return X.cols() > 0 ? static_cast<double>(correct) / static_cast<double>(X.cols()) : 0.0;
}

double classification_accuracy(const spectral::SpectralReduNetModel& model,
                               std::span<const MultiChannelSignal> signals,
                               const Partition& part) {
  Index correct = 0;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (spectral::classify(model, signals[i]) == part.class_of[i]) ++correct;
  }
  return signals.empty() ? 0.0
                         : static_cast<double>(correct) / static_cast<double>(signals.size());
}

int run_redunet(const ExperimentConfig& cfg, const fs::path& out) {
  const auto train = materialize_dataset(cfg.dataset, cfg.seed);

  redunet::BuildConfig bc;
  bc.num_layers = cfg.redunet.layers;
  bc.eta = cfg.redunet.eta;
  bc.lambda = cfg.redunet.lambda;
  bc.params.epsilon = cfg.redunet.epsilon;
  bc.seed = cfg.seed;
  bc.threads = cfg.threads;

  const auto model = redunet::build_redunet(train.dense.X, train.dense.part, bc);
  const auto trace = redunet::layer_rate_trace(model, train.dense.X, train.dense.part);
  const auto record = redunet::forward(model, train.dense.X, cfg.threads);

  io::write_dataset_csv(out / "dataset.csv", train.dense);
  io::save_redunet(out / "model.json", model);
  io::write_rate_trace_csv(out / "rate_trace.csv", trace);

  MetricsWriter metrics;
  metrics.add("kind", to_string(cfg.kind));
  metrics.add("R", trace.back().R);
  metrics.add("Rc", trace.back().Rc);
  metrics.add("dR", trace.back().dR);
  metrics.add("dR_input", trace.front().dR);
  metrics.add("train_accuracy", classification_accuracy(model, train.dense.X, train.dense.part));
  const bool generated = cfg.dataset.type == "subspace_mixture" || cfg.dataset.type == "nonlinear";
  if (generated) {
    const auto holdout = materialize_dataset(cfg.dataset, holdout_seed(cfg.seed));
    metrics.add("holdout_accuracy",
                classification_accuracy(model, holdout.dense.X, holdout.dense.part));
  }
  metrics.add("block_diagonality",
              data::block_diagonality(record.features, train.dense.part));
  const auto spectra = data::per_class_spectrum(record.features, train.dense.part);
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const auto& s = spectra[j];
    metrics.add("sigma1_class" + std::to_string(j), s.size() > 0 ? s(0) : 0.0);
    metrics.add("sigma2_ratio_class" + std::to_string(j),
                s.size() > 1 && s(0) > 0.0 ? s(1) / s(0) : 0.0);
  }
  if (!train.bases.empty()) {
    for (std::size_t j = 0; j < train.bases.size(); ++j) {
      const auto angles = data::principal_angles(train.bases[j], model.class_subspaces[j]);
      metrics.add("max_principal_angle_class" + std::to_string(j), angles.back());
    }
  }
  metrics.write(out / "metrics.csv");
  return 0;
}

int run_spectral(const ExperimentConfig& cfg, const fs::path& out) {
  const auto train = materialize_dataset(cfg.dataset, cfg.seed);
  if (!train.is_signals) {
    throw ConfigError("dataset.type: spectral experiments need signal_classes or shift_orbit");
  }

  redunet::BuildConfig bc;
  bc.num_layers = cfg.spectral.layers;
  bc.eta = cfg.spectral.eta;
  bc.lambda = cfg.spectral.lambda;
  bc.params.epsilon = cfg.spectral.epsilon;
  bc.seed = cfg.seed;
  bc.threads = cfg.threads;

  const auto model = spectral::build_spectral_redunet(train.signals, train.signal_part, bc);
  const auto trace = spectral::layer_rate_trace(model, train.signals, train.signal_part);
  io::save_spectral(out / "model.json", model);
  io::write_rate_trace_csv(out / "rate_trace.csv", trace);

  // Block-diagonality of features before/after, on the shift-augmented set.
  const auto [Z_in, aug_part] = spectral::augment_to_feature_matrix(train.signals, train.signal_part);
  const auto rec = spectral::forward(model, train.signals);
  const auto [Z_out, aug_part2] = spectral::augment_to_feature_matrix(rec.features, train.signal_part);

  MetricsWriter metrics;
  metrics.add("kind", to_string(cfg.kind));
  metrics.add("R", trace.back().R);
  metrics.add("Rc", trace.back().Rc);
  metrics.add("dR", trace.back().dR);
  metrics.add("dR_input", trace.front().dR);
  metrics.add("block_diagonality_input", data::block_diagonality(Z_in, aug_part));
  metrics.add("block_diagonality_final", data::block_diagonality(Z_out, aug_part2));
  metrics.add("train_accuracy", classification_accuracy(model, train.signals, train.signal_part));
  if (cfg.dataset.type == "signal_classes") {
    const auto holdout = materialize_dataset(cfg.dataset, holdout_seed(cfg.seed));
    metrics.add("holdout_accuracy",
                classification_accuracy(model, holdout.signals, holdout.signal_part));
  }
  metrics.write(out / "metrics.csv");
  return 0;
}

ctrl::GameConfig game_config(const ExperimentConfig& cfg) {
  ctrl::GameConfig gc;
  gc.feature_dim = cfg.ctrl.feature_dim;
  gc.rounds = cfg.ctrl.rounds;
  gc.steps_f = cfg.ctrl.steps_f;
  gc.steps_g = cfg.ctrl.steps_g;
  gc.lr_f = cfg.ctrl.lr_f;
  gc.lr_g = cfg.ctrl.lr_g;
  gc.params.epsilon = cfg.ctrl.epsilon;
  gc.seed = cfg.seed;
  return gc;
}

// Reconstruction-subspace diagnostics: max principal angle between each
// ground-truth class subspace and the span of its reconstructions.
void add_reconstruction_angles(MetricsWriter& metrics, const ctrl::TranscriptionState& state,
                               const MaterializedData& data) {
  if (data.bases.empty()) return;
  const auto members = data.dense.part.members();
  for (std::size_t j = 0; j < data.bases.size(); ++j) {
    const Matrix Xj = select_columns(data.dense.X, members[j]);
    const Matrix rec = ctrl::decode(state, ctrl::encode(state, Xj));
    Eigen::JacobiSVD<Matrix> svd(rec, Eigen::ComputeThinU);
    const Index dim = std::min<Index>(data.bases[j].cols(), svd.matrixU().cols());
    const Matrix U = svd.matrixU().leftCols(dim);
    const auto angles = data::principal_angles(data.bases[j], U);
    metrics.add("max_principal_angle_class" + std::to_string(j), angles.back());
  }
}

int run_ctrl(const ExperimentConfig& cfg, const fs::path& out) {
  const auto data = materialize_dataset(cfg.dataset, cfg.seed);
  const auto gc = game_config(cfg);

  const auto state = ctrl::train_transcription(data.dense.X, data.dense.part, gc);
  io::write_game_history_csv(out / "history.csv", state.history);
  io::save_transcription(out / "state.json", state, gc.params);

  const auto ub = ctrl::game_utility(state, data.dense.X, data.dense.part, gc.params);
  MetricsWriter metrics;
  metrics.add("kind", to_string(cfg.kind));
  metrics.add("dR_Z", ub.dR_Z);
  metrics.add("dR_Zhat", ub.dR_Zhat);
  metrics.add("dR_pair", ub.dR_pair);
  metrics.add("utility", ub.total());
  const Matrix ff = state.f * state.f.transpose();
  metrics.add("f_orthonormality_error",
              (ff - Matrix::Identity(ff.rows(), ff.cols())).cwiseAbs().maxCoeff());
  add_reconstruction_angles(metrics, state, data);
  metrics.write(out / "metrics.csv");
  return 0;
}

int run_ctrl_incremental(const ExperimentConfig& cfg, const fs::path& out) {
  const auto data = materialize_dataset(cfg.dataset, cfg.seed);
  if (data.dense.part.k < 2) {
    throw ConfigError("dataset.classes: the incremental curriculum needs >= 2 classes");
  }

  // Curriculum: pretrain on all classes but the last, then take the last
  // class as the incremental task.
  const int k_old = data.dense.part.k - 1;
  const auto members = data.dense.part.members();
  std::vector<Index> old_cols, new_cols;
  for (int j = 0; j < k_old; ++j) {
    old_cols.insert(old_cols.end(), members[static_cast<std::size_t>(j)].begin(),
                    members[static_cast<std::size_t>(j)].end());
  }
  new_cols = members[static_cast<std::size_t>(k_old)];

  const Matrix X_old = select_columns(data.dense.X, old_cols);
  const Matrix X_new = select_columns(data.dense.X, new_cols);
  std::vector<std::int32_t> old_labels;
  for (Index c : old_cols) {
    old_labels.push_back(data.dense.part.class_of[static_cast<std::size_t>(c)]);
  }
  const Partition part_old(std::move(old_labels), k_old);

  auto gc = game_config(cfg);
  const auto pre = ctrl::train_transcription(X_old, part_old, gc);
  io::write_game_history_csv(out / "pretrain_history.csv", pre.history);

  const Matrix Z_old = ctrl::encode(pre, X_old);
  auto gc_inc = gc;
  gc_inc.rounds = cfg.ctrl.incremental_rounds;
  gc_inc.rho = cfg.ctrl.rho;
  ctrl::TranscriptionState start = pre;
  start.history.clear();
  const auto post = ctrl::incremental_step(start, X_new, Z_old, gc_inc);
  io::write_game_history_csv(out / "incremental_history.csv", post.history);
  io::save_transcription(out / "state.json", post, gc.params);

  MetricsWriter metrics;
  metrics.add("kind", to_string(cfg.kind));
  metrics.add("rho", cfg.ctrl.rho);
  metrics.add("old_class_residual_before", ctrl::fixed_point_residual(pre, Z_old, gc.params));
  metrics.add("old_class_residual", ctrl::fixed_point_residual(post, Z_old, gc.params));
  const auto ub = ctrl::game_utility(post, X_new, Partition::single_class(X_new.cols()), gc.params);
  metrics.add("new_dR_pair", ub.dR_pair);
  metrics.write(out / "metrics.csv");
  return 0;
}

int run_attention_profile(const ExperimentConfig& cfg, const fs::path& out) {
  Rng rng(cfg.seed);
  Matrix Z = rng.gaussian_matrix(cfg.attention.dim, cfg.attention.samples);
  Z = normalize_columns(Z);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Z * Z.transpose());
  const double lmax = eig.eigenvalues().maxCoeff();

  // Log-spaced targets for alpha * lambda_max, mapped back to alphas.
  std::vector<double> alphas;
  const double lo = std::log(cfg.attention.alpha_lmax_min);
  const double hi = std::log(cfg.attention.alpha_lmax_max);
  for (int i = 0; i < cfg.attention.grid; ++i) {
    const double t = cfg.attention.grid == 1
                         ? lo
                         : lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(cfg.attention.grid - 1);
    alphas.push_back(std::exp(t) / lmax);
  }
  const auto profile = attention::approximation_error_profile(Z, alphas);

  std::ofstream os(out / "error_profile.csv");
  if (!os) throw Error("cannot write error_profile.csv");
  os << "alpha_lmax,rel_err\n";
  for (const auto& p : profile) {
    os << io::format_double(p.alpha_lmax) << "," << io::format_double(p.rel_err) << "\n";
  }
  return 0;
}

int run_bench(const ExperimentConfig& cfg, const fs::path& out) {
  std::ofstream os(out / "bench.csv");
  if (!os) throw Error("cannot write bench.csv");
  os << "T,C,dense_ms,spectral_ms,max_abs_err\n";

  for (Index taps : cfg.bench.taps) {
    const auto signals = data::random_signals(cfg.bench.channels, taps, 4, 0.0, cfg.seed, 0);
    const double alpha = rate::alpha_for(rate::RateParams{}, cfg.bench.channels * taps,
                                         static_cast<Index>(signals.size()) * taps);
    const auto op = spectral::circulant_expansion(signals, alpha);
    const Matrix dense = spectral::densify(op);
    const MultiChannelSignal probe =
        data::random_signals(cfg.bench.channels, taps, 1, 0.0, cfg.seed + 1, 0).front();
    const Vector x = spectral::vectorize(probe);

    const auto median_time_ms = [&](auto&& fn) {
      std::vector<double> times;
      times.reserve(static_cast<std::size_t>(cfg.bench.reps));
      for (int r = 0; r < cfg.bench.reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      return times[times.size() / 2];
    };

    Vector dense_out;
    MultiChannelSignal spectral_out;
    const double dense_ms = median_time_ms([&] { dense_out = dense * x; });
    const double spectral_ms = median_time_ms([&] { spectral_out = spectral::spectral_apply(op, probe); });
    const double err = (spectral::vectorize(spectral_out) - dense_out).cwiseAbs().maxCoeff();

    os << taps << "," << cfg.bench.channels << "," << io::format_double(dense_ms) << ","
       << io::format_double(spectral_ms) << "," << io::format_double(err) << "\n";
  }
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const fs::path out = resolve_out_dir(cfg);
  fs::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();

  int code = 0;
  switch (cfg.kind) {
    case ExperimentKind::Redunet: code = run_redunet(cfg, out); break;
    case ExperimentKind::Spectral: code = run_spectral(cfg, out); break;
    case ExperimentKind::Ctrl: code = run_ctrl(cfg, out); break;
    case ExperimentKind::CtrlIncremental: code = run_ctrl_incremental(cfg, out); break;
    case ExperimentKind::AttentionProfile: code = run_attention_profile(cfg, out); break;
    case ExperimentKind::Bench: code = run_bench(cfg, out); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out, cfg, wall);
  return code;
}

int run_eval(const fs::path& model_path, const fs::path& data_path, const fs::path& out_dir,
             int threads) {
  fs::create_directories(out_dir);
  io::Dataset ds = data_path.extension() == ".bin" ? io::read_dataset_binary(data_path)
                                                   : io::read_dataset_csv(data_path);

  // Model flavor is detected from the document keys.
  std::ifstream is(model_path);
  if (!is) throw ConfigError("cannot open model file " + model_path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed model JSON: " + std::string(e.what()));
  }

  MetricsWriter metrics;
  metrics.add("kind", "eval");
  if (j.contains("channels")) {
    const auto model = io::load_spectral(model_path);
    if (ds.X.rows() != model.channels * model.taps) {
      throw ShapeError("eval: dataset dimension does not match the spectral model");
    }
    std::vector<MultiChannelSignal> signals;
    for (Index i = 0; i < ds.X.cols(); ++i) {
      signals.push_back(spectral::unvectorize(ds.X.col(i), model.channels, model.taps));
    }
    metrics.add("accuracy", classification_accuracy(model, signals, ds.part));
    const auto rec = spectral::forward(model, signals);
    const auto [Z_out, aug_part] = spectral::augment_to_feature_matrix(rec.features, ds.part);
    metrics.add("block_diagonality_final", data::block_diagonality(Z_out, aug_part));
  } else if (j.contains("layers")) {
    const auto model = io::load_redunet(model_path);
    if (ds.X.rows() != model.d) throw ShapeError("eval: dataset dimension does not match the model");
    metrics.add("accuracy", classification_accuracy(model, ds.X, ds.part));
    const auto rec = redunet::forward(model, ds.X, threads);
    metrics.add("block_diagonality_final", data::block_diagonality(rec.features, ds.part));
    const auto trace = redunet::layer_rate_trace(model, ds.X, ds.part);
    metrics.add("dR_final", trace.back().dR);
  } else {
    throw ConfigError("eval: unrecognized model document");
  }
  metrics.write(out_dir / "metrics.csv");
  return 0;
}

int run_report(const fs::path& run_dir, std::ostream& os) {
  const fs::path metrics_path = run_dir / "metrics.csv";
  if (!fs::exists(metrics_path)) {
    throw ConfigError("no metrics.csv under " + run_dir.string());
  }
  std::ifstream is(metrics_path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t width = 6;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    width = std::max(width, rows.back().first.size());
  }
  os << std::left << std::setw(static_cast<int>(width) + 2) << "metric" << "value\n";
  for (const auto& [k, v] : rows) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
  }
  return 0;
}

}  // namespace ldr::cli
