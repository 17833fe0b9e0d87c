#pragma once

#include <functional>
#include <vector>

#include "carleman/model.hpp"

namespace carleman {

/// Analytic far-field profile for the density, frozen at its initial trace.
using ScalarFarField = std::function<double(const Point&)>;

struct LimitSnapshot {
  double t = 0.0;
  Field rho;
};

struct LimitRun {
  ModelParams params;
  Grid grid;
  std::vector<LimitSnapshot> snapshots;
  std::vector<double> dt_log;
  long steps = 0;
};

/// Diffusivity of the limit equation rho_t = div(D(rho) grad rho) for the
/// power rate: D(rho) = n^(alpha-1) rho^(-alpha).
double diffusivity(const ModelParams& params, double rho);

struct LimitOptions {
  double cfl = 0.45;  ///< dt <= cfl * dx^2 / (2n max D)
  double density_floor = kDensityFloor;
  double min_dt = 1e-15;
  int threads = 1;
};

/// Explicit finite-volume integration with arithmetic-mean face diffusivity
/// and adaptive stable dt; lands exactly on the requested snapshot times.
LimitRun advance_limit(const Field& rho0, const ModelParams& params,
                       const Grid& grid, double t_end,
                       const std::vector<double>& snapshot_times,
                       const LimitOptions& opts = {},
                       const ScalarFarField* far_field = nullptr);

}  // namespace carleman
