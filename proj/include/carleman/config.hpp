#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carleman/initial_data.hpp"

namespace carleman {

struct DiagnosticsToggles {
  bool convergence = true;
  bool flux_l2 = false;
  bool ficks = false;
  bool contraction = false;
  bool entropy = false;
};

/// Normalized experiment description parsed from the JSON config schema
/// (schema_version 1).
struct ExperimentConfig {
  int schema_version = 1;
  ModelParams model;  ///< epsilon field unused; the sweep list drives runs
  RateSpec rate;
  Grid grid;
  InitialDataSpec initial;
  std::vector<double> epsilons;  ///< strictly decreasing
  double t_end = 0.0;
  double horizon_fraction = 0.25;
  std::vector<double> snapshot_times;
  std::optional<BarrierSpec> lower_barrier;
  std::optional<BarrierSpec> upper_barrier;
  DiagnosticsToggles diagnostics;
  std::string output_dir = "out";
  uint64_t seed = 0;
  int threads = 1;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  ///< "field.path: message"
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Parses and cross-validates a config file. All violations are collected
/// with their field paths rather than thrown.
ValidationResult validate_config(const std::string& path);

/// Same, from an in-memory JSON document.
ValidationResult validate_config_text(const std::string& json_text);

}  // namespace carleman
