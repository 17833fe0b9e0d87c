// Batch front end for the kinetic diffusive-limit laboratory.
//
// Exit codes: 0 success, 2 config error, 3 solver error, 4 diagnostic
// assertion failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "carleman/experiment.hpp"
#include "carleman/plots.hpp"

namespace {

constexpr int kOk = 0, kConfigError = 2, kSolverError = 3, kDiagError = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

int load_config(const CommonArgs& args, carleman::ExperimentConfig& cfg,
                std::string& config_text) {
  std::ifstream is(args.config_path);
  if (!is) {
    std::cerr << "error: cannot read " << args.config_path << "\n";
    return kConfigError;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  config_text = ss.str();
  const carleman::ValidationResult vr = carleman::validate_config_text(config_text);
  for (const std::string& w : vr.warnings) std::cerr << "warning: " << w << "\n";
  if (!vr.ok()) {
    for (const std::string& e : vr.errors) std::cerr << "error: " << e << "\n";
    return kConfigError;
  }
  cfg = *vr.config;
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.seed_set) cfg.seed = args.seed;
  if (args.threads > 0) cfg.threads = args.threads;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carleman kinetic system laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd, bool need_config = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "experiment config JSON");
    if (need_config) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory override");
    cmd->add_option("--seed", args.seed, "seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker thread count");
  };

  auto* validate = app.add_subcommand("validate", "check a config file");
  add_common(validate);

  auto* run = app.add_subcommand("run", "run the configured experiment");
  add_common(run);

  auto* certify = app.add_subcommand("certify-barriers",
                                     "emit barrier sign certificates");
  add_common(certify);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize an artifact directory");
  report->add_option("--out", report_dir, "artifact directory")->required();

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "emit SVG plots for an artifact directory");
  plot->add_option("--out", plot_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      carleman::ExperimentConfig cfg;
      std::string text;
      const int rc = load_config(args, cfg, text);
      if (rc == kOk) std::cout << "config ok\n";
      return rc;
    }
    if (run->parsed()) {
      carleman::ExperimentConfig cfg;
      std::string text;
      const int rc = load_config(args, cfg, text);
      if (rc != kOk) return rc;
      try {
        const carleman::ExperimentResult res = carleman::run_experiment(cfg, text);
        std::cout << "wrote " << res.files.size() << " artifacts to "
                  << res.output_dir << "\n";
        if (res.ran_convergence) {
          for (const auto& row : res.convergence.rows)
            std::cout << "  eps " << row.epsilon << ": e = " << row.e_value
                      << ", isotropy gap = " << row.isotropy_gap << "\n";
          if (!res.convergence.e_strictly_decreasing) {
            std::cerr << "diagnostic failure: e(eps) is not strictly decreasing\n";
            return kDiagError;
          }
        }
        return kOk;
      } catch (const std::runtime_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolverError;
      }
    }
    if (certify->parsed()) {
      carleman::ExperimentConfig cfg;
      std::string text;
      const int rc = load_config(args, cfg, text);
      if (rc != kOk) return rc;
      const auto files = carleman::certify_barriers_experiment(cfg);
      for (const std::string& f : files)
        std::cout << "wrote " << cfg.output_dir << "/" << f << "\n";
      return kOk;
    }
    if (report->parsed()) {
      std::cout << carleman::report_from_artifacts(report_dir);
      return kOk;
    }
    if (plot->parsed()) {
      std::cout << carleman::emit_plots(plot_dir);
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverError;
  }
  return kOk;
}
