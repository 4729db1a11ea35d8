#include "ldr/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

namespace ldr::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key)) fail(path, "unknown key '" + key + "'");
  }
}

template <typename T>
T get_number(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<T>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be positive");
}
void require_nonnegative(double v, const std::string& path) {
  if (v < 0.0) fail(path, "must be >= 0");
}
void require_at_least(long long v, long long bound, const std::string& path) {
  if (v < bound) fail(path, "must be >= " + std::to_string(bound));
}

DatasetConfig parse_dataset(const json& obj, const std::string& path, DatasetConfig defaults) {
  DatasetConfig ds = std::move(defaults);
  ds.type = get_string(obj, path, "type", ds.type);

  static const std::set<std::string> kTypes = {"subspace_mixture", "nonlinear", "signal_classes",
                                               "shift_orbit", "file"};
  if (!kTypes.contains(ds.type)) fail(path + ".type", "unknown dataset type '" + ds.type + "'");

  if (ds.type == "subspace_mixture") {
    check_keys(obj, path,
               {"type", "ambient_dim", "classes", "min_principal_angle_deg", "basis_seed"});
    ds.ambient_dim = get_number<Index>(obj, path, "ambient_dim", ds.ambient_dim);
    require_at_least(ds.ambient_dim, 1, path + ".ambient_dim");
    ds.basis_seed = get_number<std::uint64_t>(obj, path, "basis_seed", ds.basis_seed);
    if (obj.contains("min_principal_angle_deg")) {
      const double deg = obj["min_principal_angle_deg"].get<double>();
      if (deg < 0.0 || deg > 90.0) fail(path + ".min_principal_angle_deg", "must lie in [0, 90]");
      ds.min_principal_angle_deg = deg;
    }
    if (obj.contains("classes")) {
      if (!obj["classes"].is_array() || obj["classes"].empty()) {
        fail(path + ".classes", "expected a non-empty array");
      }
      ds.classes.clear();
      int idx = 0;
      for (const auto& jc : obj["classes"]) {
        const std::string cpath = path + ".classes[" + std::to_string(idx++) + "]";
        check_keys(jc, cpath, {"dim", "samples", "noise"});
        data::ClassSpec spec;
        spec.dim = get_number<Index>(jc, cpath, "dim", 1);
        spec.samples = get_number<Index>(jc, cpath, "samples", 30);
        spec.noise = get_number<double>(jc, cpath, "noise", 0.0);
        require_at_least(spec.dim, 1, cpath + ".dim");
        require_at_least(spec.samples, 1, cpath + ".samples");
        require_nonnegative(spec.noise, cpath + ".noise");
        ds.classes.push_back(spec);
      }
    }
  } else if (ds.type == "nonlinear") {
    check_keys(obj, path, {"type", "manifold", "samples", "noise"});
    ds.manifold = get_string(obj, path, "manifold", ds.manifold);
    if (ds.manifold != "circles" && ds.manifold != "helix" && ds.manifold != "moons") {
      fail(path + ".manifold", "expected circles, helix or moons");
    }
    ds.samples = get_number<Index>(obj, path, "samples", ds.samples);
    require_at_least(ds.samples, 2, path + ".samples");
    ds.noise = get_number<double>(obj, path, "noise", ds.noise);
    require_nonnegative(ds.noise, path + ".noise");
  } else if (ds.type == "signal_classes" || ds.type == "shift_orbit") {
    check_keys(obj, path,
               {"type", "channels", "taps", "num_classes", "samples_per_class", "num_signals",
                "smooth_taps", "noise", "basis_seed"});
    ds.basis_seed = get_number<std::uint64_t>(obj, path, "basis_seed", ds.basis_seed);
    ds.channels = get_number<Index>(obj, path, "channels", ds.channels);
    ds.taps = get_number<Index>(obj, path, "taps", ds.taps);
    ds.num_classes = get_number<Index>(obj, path, "num_classes", ds.num_classes);
    ds.samples_per_class = get_number<Index>(obj, path, "samples_per_class", ds.samples_per_class);
    ds.num_signals = get_number<Index>(obj, path, "num_signals", ds.num_signals);
    ds.smooth_taps = get_number<Index>(obj, path, "smooth_taps", ds.smooth_taps);
    ds.signal_noise = get_number<double>(obj, path, "noise", ds.signal_noise);
    require_at_least(ds.channels, 1, path + ".channels");
    require_at_least(ds.taps, 1, path + ".taps");
    require_at_least(ds.num_classes, 1, path + ".num_classes");
    require_at_least(ds.samples_per_class, 1, path + ".samples_per_class");
    require_at_least(ds.num_signals, 1, path + ".num_signals");
    require_at_least(ds.smooth_taps, 0, path + ".smooth_taps");
    require_nonnegative(ds.signal_noise, path + ".noise");
  } else {  // file
    check_keys(obj, path, {"type", "path"});
    ds.path = get_string(obj, path, "path", ds.path);
    if (ds.path.empty()) fail(path + ".path", "required for dataset type 'file'");
  }
  return ds;
}

json dataset_to_json(const DatasetConfig& ds) {
  json j;
  j["type"] = ds.type;
  if (ds.type == "subspace_mixture") {
    j["ambient_dim"] = ds.ambient_dim;
    j["basis_seed"] = ds.basis_seed;
    if (ds.min_principal_angle_deg) j["min_principal_angle_deg"] = *ds.min_principal_angle_deg;
    json classes = json::array();
    for (const auto& c : ds.classes) {
      classes.push_back({{"dim", c.dim}, {"samples", c.samples}, {"noise", c.noise}});
    }
    j["classes"] = std::move(classes);
  } else if (ds.type == "nonlinear") {
    j["manifold"] = ds.manifold;
    j["samples"] = ds.samples;
    j["noise"] = ds.noise;
  } else if (ds.type == "signal_classes" || ds.type == "shift_orbit") {
    j["basis_seed"] = ds.basis_seed;
    j["channels"] = ds.channels;
    j["taps"] = ds.taps;
    if (ds.type == "signal_classes") {
      j["num_classes"] = ds.num_classes;
      j["samples_per_class"] = ds.samples_per_class;
    } else {
      j["num_signals"] = ds.num_signals;
    }
    j["smooth_taps"] = ds.smooth_taps;
    j["noise"] = ds.signal_noise;
  } else {
    j["path"] = ds.path;
  }
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Redunet: return "redunet";
    case ExperimentKind::Spectral: return "spectral";
    case ExperimentKind::Ctrl: return "ctrl";
    case ExperimentKind::CtrlIncremental: return "ctrl-incremental";
    case ExperimentKind::AttentionProfile: return "attention-profile";
    case ExperimentKind::Bench: return "bench";
  }
  throw Error("unreachable experiment kind");
}

ExperimentKind kind_from_string(const std::string& name) {
  if (name == "redunet") return ExperimentKind::Redunet;
  if (name == "spectral") return ExperimentKind::Spectral;
  if (name == "ctrl") return ExperimentKind::Ctrl;
  if (name == "ctrl-incremental") return ExperimentKind::CtrlIncremental;
  if (name == "attention-profile") return ExperimentKind::AttentionProfile;
  if (name == "bench") return ExperimentKind::Bench;
  throw ConfigError("kind: unknown experiment kind '" + name + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::Redunet:
      // Three orthogonal 1-D classes in R^8.
      cfg.dataset.type = "subspace_mixture";
      cfg.dataset.ambient_dim = 8;
      cfg.dataset.classes = {{1, 30, 1e-3}, {1, 30, 1e-3}, {1, 30, 1e-3}};
      cfg.dataset.min_principal_angle_deg = 90.0;
      break;
    case ExperimentKind::Spectral:
      cfg.dataset.type = "signal_classes";
      break;
    case ExperimentKind::Ctrl:
      // Two orthogonal 2-D subspaces in R^20.
      cfg.dataset.type = "subspace_mixture";
      cfg.dataset.ambient_dim = 20;
      cfg.dataset.classes = {{2, 200, 0.0}, {2, 200, 0.0}};
      cfg.dataset.min_principal_angle_deg = 90.0;
      break;
    case ExperimentKind::CtrlIncremental:
      // 2-then-1 subspace curriculum: the last class arrives incrementally.
      cfg.dataset.type = "subspace_mixture";
      cfg.dataset.ambient_dim = 20;
      cfg.dataset.classes = {{2, 200, 0.0}, {2, 200, 0.0}, {2, 200, 0.0}};
      cfg.dataset.min_principal_angle_deg = 90.0;
      break;
    case ExperimentKind::AttentionProfile:
    case ExperimentKind::Bench:
      break;
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  check_keys(j, "$",
             {"kind", "seed", "out_dir", "threads", "dataset", "redunet", "spectral", "attention",
              "ctrl", "bench"});
  if (!j.contains("kind")) throw ConfigError("kind: required key missing");
  if (!j.contains("seed")) throw ConfigError("seed: required key missing (no wall-clock seeding)");
  if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");

  ExperimentConfig cfg = default_config(kind_from_string(j["kind"].get<std::string>()));
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.out_dir = get_string(j, "$", "out_dir", "");
  cfg.threads = get_number<int>(j, "$", "threads", 1);
  require_at_least(cfg.threads, 1, "$.threads");

  if (j.contains("dataset")) cfg.dataset = parse_dataset(j["dataset"], "dataset", cfg.dataset);

  if (j.contains("redunet")) {
    const auto& o = j["redunet"];
    check_keys(o, "redunet", {"layers", "eta", "lambda", "epsilon"});
    cfg.redunet.layers = get_number<int>(o, "redunet", "layers", cfg.redunet.layers);
    cfg.redunet.eta = get_number<double>(o, "redunet", "eta", cfg.redunet.eta);
    cfg.redunet.lambda = get_number<double>(o, "redunet", "lambda", cfg.redunet.lambda);
    cfg.redunet.epsilon = get_number<double>(o, "redunet", "epsilon", cfg.redunet.epsilon);
    require_at_least(cfg.redunet.layers, 1, "redunet.layers");
    require_nonnegative(cfg.redunet.eta, "redunet.eta");
    require_positive(cfg.redunet.lambda, "redunet.lambda");
    require_positive(cfg.redunet.epsilon, "redunet.epsilon");
  }
  if (j.contains("spectral")) {
    const auto& o = j["spectral"];
    check_keys(o, "spectral", {"layers", "eta", "lambda", "epsilon"});
    cfg.spectral.layers = get_number<int>(o, "spectral", "layers", cfg.spectral.layers);
    cfg.spectral.eta = get_number<double>(o, "spectral", "eta", cfg.spectral.eta);
    cfg.spectral.lambda = get_number<double>(o, "spectral", "lambda", cfg.spectral.lambda);
    cfg.spectral.epsilon = get_number<double>(o, "spectral", "epsilon", cfg.spectral.epsilon);
    require_at_least(cfg.spectral.layers, 1, "spectral.layers");
    require_nonnegative(cfg.spectral.eta, "spectral.eta");
    require_positive(cfg.spectral.lambda, "spectral.lambda");
    require_positive(cfg.spectral.epsilon, "spectral.epsilon");
  }
  if (j.contains("attention")) {
    const auto& o = j["attention"];
    check_keys(o, "attention", {"dim", "samples", "alpha_lmax_min", "alpha_lmax_max", "grid"});
    cfg.attention.dim = get_number<Index>(o, "attention", "dim", cfg.attention.dim);
    cfg.attention.samples = get_number<Index>(o, "attention", "samples", cfg.attention.samples);
    cfg.attention.alpha_lmax_min =
        get_number<double>(o, "attention", "alpha_lmax_min", cfg.attention.alpha_lmax_min);
    cfg.attention.alpha_lmax_max =
        get_number<double>(o, "attention", "alpha_lmax_max", cfg.attention.alpha_lmax_max);
    cfg.attention.grid = get_number<int>(o, "attention", "grid", cfg.attention.grid);
    require_at_least(cfg.attention.dim, 1, "attention.dim");
    require_at_least(cfg.attention.samples, 1, "attention.samples");
    require_positive(cfg.attention.alpha_lmax_min, "attention.alpha_lmax_min");
    require_positive(cfg.attention.alpha_lmax_max, "attention.alpha_lmax_max");
    if (cfg.attention.alpha_lmax_max < cfg.attention.alpha_lmax_min) {
      fail("attention.alpha_lmax_max", "must be >= alpha_lmax_min");
    }
    require_at_least(cfg.attention.grid, 2, "attention.grid");
  }
  if (j.contains("ctrl")) {
    const auto& o = j["ctrl"];
    check_keys(o, "ctrl",
               {"feature_dim", "rounds", "steps_f", "steps_g", "lr_f", "lr_g", "rho", "epsilon",
                "incremental_rounds"});
    cfg.ctrl.feature_dim = get_number<Index>(o, "ctrl", "feature_dim", cfg.ctrl.feature_dim);
    cfg.ctrl.rounds = get_number<int>(o, "ctrl", "rounds", cfg.ctrl.rounds);
    cfg.ctrl.steps_f = get_number<int>(o, "ctrl", "steps_f", cfg.ctrl.steps_f);
    cfg.ctrl.steps_g = get_number<int>(o, "ctrl", "steps_g", cfg.ctrl.steps_g);
    cfg.ctrl.lr_f = get_number<double>(o, "ctrl", "lr_f", cfg.ctrl.lr_f);
    cfg.ctrl.lr_g = get_number<double>(o, "ctrl", "lr_g", cfg.ctrl.lr_g);
    cfg.ctrl.rho = get_number<double>(o, "ctrl", "rho", cfg.ctrl.rho);
    cfg.ctrl.epsilon = get_number<double>(o, "ctrl", "epsilon", cfg.ctrl.epsilon);
    cfg.ctrl.incremental_rounds =
        get_number<int>(o, "ctrl", "incremental_rounds", cfg.ctrl.incremental_rounds);
    require_at_least(cfg.ctrl.feature_dim, 1, "ctrl.feature_dim");
    require_at_least(cfg.ctrl.rounds, 0, "ctrl.rounds");
    require_at_least(cfg.ctrl.steps_f, 1, "ctrl.steps_f");
    require_at_least(cfg.ctrl.steps_g, 1, "ctrl.steps_g");
    require_positive(cfg.ctrl.lr_f, "ctrl.lr_f");
    require_positive(cfg.ctrl.lr_g, "ctrl.lr_g");
    require_nonnegative(cfg.ctrl.rho, "ctrl.rho");
    require_positive(cfg.ctrl.epsilon, "ctrl.epsilon");
    require_at_least(cfg.ctrl.incremental_rounds, 0, "ctrl.incremental_rounds");
  }
  if (j.contains("bench")) {
    const auto& o = j["bench"];
    check_keys(o, "bench", {"taps", "channels", "reps"});
    if (o.contains("taps")) {
      if (!o["taps"].is_array() || o["taps"].empty()) fail("bench.taps", "expected a non-empty array");
      cfg.bench.taps.clear();
      for (const auto& t : o["taps"]) {
        const auto taps = t.get<Index>();
        require_at_least(taps, 2, "bench.taps[]");
        cfg.bench.taps.push_back(taps);
      }
    }
    cfg.bench.channels = get_number<Index>(o, "bench", "channels", cfg.bench.channels);
    cfg.bench.reps = get_number<int>(o, "bench", "reps", cfg.bench.reps);
    require_at_least(cfg.bench.channels, 1, "bench.channels");
    require_at_least(cfg.bench.reps, 1, "bench.reps");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["dataset"] = dataset_to_json(cfg.dataset);
  j["redunet"] = {{"layers", cfg.redunet.layers},
                  {"eta", cfg.redunet.eta},
                  {"lambda", cfg.redunet.lambda},
                  {"epsilon", cfg.redunet.epsilon}};
  j["spectral"] = {{"layers", cfg.spectral.layers},
                   {"eta", cfg.spectral.eta},
                   {"lambda", cfg.spectral.lambda},
                   {"epsilon", cfg.spectral.epsilon}};
  j["attention"] = {{"dim", cfg.attention.dim},
                    {"samples", cfg.attention.samples},
                    {"alpha_lmax_min", cfg.attention.alpha_lmax_min},
                    {"alpha_lmax_max", cfg.attention.alpha_lmax_max},
                    {"grid", cfg.attention.grid}};
  j["ctrl"] = {{"feature_dim", cfg.ctrl.feature_dim},
               {"rounds", cfg.ctrl.rounds},
               {"steps_f", cfg.ctrl.steps_f},
               {"steps_g", cfg.ctrl.steps_g},
               {"lr_f", cfg.ctrl.lr_f},
               {"lr_g", cfg.ctrl.lr_g},
               {"rho", cfg.ctrl.rho},
               {"epsilon", cfg.ctrl.epsilon},
               {"incremental_rounds", cfg.ctrl.incremental_rounds}};
  j["bench"] = {{"taps", cfg.bench.taps}, {"channels", cfg.bench.channels}, {"reps", cfg.bench.reps}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* root = std::getenv("LDRK_OUT_DIR");
  const std::filesystem::path base = (root != nullptr && *root != '\0') ? root : "./runs";
  return base / to_string(cfg.kind);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace ldr::cli
