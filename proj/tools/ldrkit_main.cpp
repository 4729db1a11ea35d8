// ldrkit: rate-reduction experiments from the command line.
//
// Subcommands mirror the experiment kinds; every run takes its parameters
// from a JSON config (plus --seed/--out/--threads overrides) and writes CSV
// metrics, serialized models and a manifest into the output directory.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "ldr/config.hpp"
#include "ldr/ctrl.hpp"
#include "ldr/errors.hpp"
#include "ldr/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "JSON experiment config");
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--out", flags.out_dir, "output directory (default: $LDRK_OUT_DIR/<kind>)");
  cmd->add_option("--threads", flags.threads, "worker thread cap (1 = reference determinism mode)");
}

ldr::cli::ExperimentConfig load_config(const CommonFlags& flags,
                                       ldr::cli::ExperimentKind expected_kind,
                                       bool allow_any_kind = false) {
  ldr::cli::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = ldr::cli::parse_config(flags.config_path);
    if (!allow_any_kind && cfg.kind != expected_kind) {
      throw ldr::ConfigError("config kind '" + ldr::cli::to_string(cfg.kind) +
                             "' does not match the subcommand");
    }
  } else {
    if (!flags.seed) {
      throw ldr::ConfigError("either --config or --seed is required (no wall-clock seeding)");
    }
    cfg = ldr::cli::default_config(expected_kind);
  }
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.threads) {
    if (*flags.threads < 1) throw ldr::ConfigError("--threads must be >= 1");
    cfg.threads = *flags.threads;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"white-box rate-reduction toolkit"};
  app.require_subcommand(1);

  using ldr::cli::ExperimentKind;

  struct SubSpec {
    const char* name;
    const char* help;
    ExperimentKind kind;
    bool generate_only;
  };
  const SubSpec specs[] = {
      {"gen-data", "generate a dataset and write CSV + binary files", ExperimentKind::Redunet, true},
      {"build-redunet", "construct a ReduNet by forward unrolling", ExperimentKind::Redunet, false},
      {"spectral-build", "construct a shift-invariant (block-circulant) ReduNet",
       ExperimentKind::Spectral, false},
      {"bench-spectral", "time spectral vs dense operator application", ExperimentKind::Bench,
       false},
      {"attention-profile", "error profile of the linear-attention gradient approximation",
       ExperimentKind::AttentionProfile, false},
      {"ctrl-train", "train the closed-loop transcription game", ExperimentKind::Ctrl, false},
      {"ctrl-incremental", "incremental transcription with the fixed-point penalty",
       ExperimentKind::CtrlIncremental, false},
  };

  std::vector<std::pair<const SubSpec*, CommonFlags>> runs;
  runs.reserve(std::size(specs));
  for (const auto& spec : specs) {
    runs.emplace_back(&spec, CommonFlags{});
  }
  for (auto& [spec, flags] : runs) {
    CLI::App* cmd = app.add_subcommand(spec->name, spec->help);
    add_common_flags(cmd, flags);
  }

  // eval and report have their own argument shapes.
  std::string eval_model, eval_data, eval_out = "./runs/eval";
  int eval_threads = 1;
  CLI::App* eval_cmd = app.add_subcommand("eval", "classify a dataset file with a stored model");
  eval_cmd->add_option("--model", eval_model, "model JSON path")->required();
  eval_cmd->add_option("--data", eval_data, "dataset path (.csv or .bin)")->required();
  eval_cmd->add_option("--out", eval_out, "output directory");
  eval_cmd->add_option("--threads", eval_threads, "worker thread cap");

  std::string report_dir;
  CLI::App* report_cmd = app.add_subcommand("report", "print the metrics table of a run directory");
  report_cmd->add_option("run_dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval_cmd->parsed()) {
      return ldr::cli::run_eval(eval_model, eval_data, eval_out, eval_threads);
    }
    if (report_cmd->parsed()) {
      return ldr::cli::run_report(report_dir, std::cout);
    }
    for (auto& [spec, flags] : runs) {
      if (!app.get_subcommand(spec->name)->parsed()) continue;
      const auto cfg = load_config(flags, spec->kind, spec->generate_only);
      return spec->generate_only ? ldr::cli::run_generate(cfg) : ldr::cli::run_experiment(cfg);
    }
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const ldr::ctrl::TranscriptionDiverged& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return 2;
  } catch (const ldr::InvalidMatrix& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ldr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
