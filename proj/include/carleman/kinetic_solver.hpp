#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carleman/interaction.hpp"
#include "carleman/model.hpp"

namespace carleman {

/// Analytic far-field profile, component index then position. Ghost cells of
/// frozen_far_field grids permanently hold these values.
using FarField = std::function<double(int, const Point&)>;

struct SolverOptions {
  double newton_tol = 1e-12;  ///< residual inf-norm
  int max_newton_iters = 50;
  int max_dt_halvings = 20;
  double density_floor = kDensityFloor;  ///< applied before rates when alpha < 0
  int threads = 1;
};

struct StepLogEntry {
  long step = 0;
  double t = 0.0;
  int newton_iters_max = 0;
  long positivity_clips = 0;
  double mass = 0.0;        ///< cell-volume-weighted total of all components
  double mass_drift = 0.0;  ///< mass - previous mass
  double min_u = 0.0;
  double max_u = 0.0;
};

struct KineticRun {
  ModelParams params;
  RateSpec rate;
  Grid grid;
  std::vector<KineticState> snapshots;
  std::vector<StepLogEntry> log;
  bool dod_warning = false;
  std::string dod_message;

  void write_step_log_csv(const std::string& path) const;
};

/// Exact lattice transport over dt = eps*dx: each component shifts one cell
/// along its velocity. Frozen far-field boundaries read the analytic initial
/// profile at ghost coordinates.
KineticState stream_step(const KineticState& state, const ModelParams& params,
                         const FarField* far_field = nullptr);

/// Backward-Euler relaxation u+ = u + dt/(2n eps^2) A(u+) solved per cell by
/// damped Newton; conserves the per-cell component sum at the solution.
KineticState collide_step(const KineticState& state, const ModelParams& params,
                          const RateSpec& rate, double dt,
                          const SolverOptions& opts = {});

/// Lie splitting (stream then collide) with dt = eps*dx. t_end is rounded
/// down to a whole number of steps; snapshots are taken at the step times
/// nearest the requested schedule.
KineticRun advance(const KineticState& initial, const ModelParams& params,
                   const RateSpec& rate, double t_end,
                   const std::vector<double>& snapshot_times,
                   const SolverOptions& opts = {},
                   const FarField* far_field = nullptr,
                   const std::optional<Region>& region_of_interest = {});

}  // namespace carleman
