#pragma once

#include <string>
#include <vector>

#include "carleman/config.hpp"
#include "carleman/diagnostics.hpp"

namespace carleman {

struct ExperimentResult {
  std::string output_dir;
  std::string manifest_path;
  std::vector<std::string> files;
  ConvergenceReport convergence;
  bool ran_convergence = false;
};

/// Runs the configured sweep: one kinetic run per epsilon, one limit run,
/// enabled diagnostics, a provenance echo of the config and a manifest with
/// content hashes of every artifact. Identical config + seed reproduce the
/// artifacts byte for byte.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& config_text);

/// Barrier certification without PDE runs: emits one JSON certificate per
/// (barrier, epsilon) pair.
std::vector<std::string> certify_barriers_experiment(const ExperimentConfig& cfg);

/// Rebuilds a human-readable summary from an artifact directory; returns the
/// summary text and writes report.json next to the manifest.
std::string report_from_artifacts(const std::string& dir);

}  // namespace carleman
