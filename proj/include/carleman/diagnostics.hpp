#pragma once

#include <string>
#include <vector>

#include "carleman/barriers.hpp"
#include "carleman/kinetic_solver.hpp"
#include "carleman/limit_solver.hpp"

namespace carleman {

/// Pass/fail record with the tolerance it was judged at and the extremal
/// witness (cell index and snapshot time of the worst value).
struct Verdict {
  std::string name;
  bool pass = false;
  double tolerance = 0.0;
  double worst = 0.0;
  Index witness_cell = -1;
  double witness_time = 0.0;
};

/// Riemann sum of sum_i (u_i - v_i)^+ over the whole grid.
double positive_part_l1(const KineticState& u, const KineticState& v);

/// min over cells and components of v_i - u_i.
double ordering_margin(const KineticState& u, const KineticState& v);

struct FluxL2 {
  double plain = 0.0;     ///< integral of sum_{i!=j} J_{i,j}^2 phi^2
  double weighted = 0.0;  ///< same with k(u_i,u_j)^2 weight
};

/// Space-Riemann, time-trapezoid quadrature of the pair-current square over
/// the run's snapshots.
FluxL2 flux_l2(const KineticRun& run, const TestCutoff& phi);

/// Same with an explicit weight field in place of the sampled cutoff.
FluxL2 flux_l2(const KineticRun& run, const Field& phi);

struct FicksResidual {
  std::vector<double> per_axis_l2;  ///< ||(1/n) d_i rho + k(rho/2n,rho/2n) J_i||_L2
  double total_l2 = 0.0;
};

/// Residual of the limit Fick law on an interior region (default: centered
/// half-domain box).
FicksResidual ficks_residual(const KineticState& state, const ModelParams& params,
                             const RateSpec& rate);
FicksResidual ficks_residual(const KineticState& state, const ModelParams& params,
                             const RateSpec& rate, const Region& region);

struct SweepRow {
  double epsilon = 0.0;
  double e_value = 0.0;       ///< max_t sum_i ||u_i - rho_limit/2n||_L1(K)
  double isotropy_gap = 0.0;  ///< max_t max_i ||u_i - rho^eps/2n||_L1(K)
};

struct ConvergenceReport {
  std::vector<SweepRow> rows;  ///< ordered by decreasing epsilon
  bool e_strictly_decreasing = false;
  bool gap_strictly_decreasing = false;
  double limit_mass_on_region = 0.0;  ///< ||rho_limit||_L1(K) at the final time
};

/// Diffusive-limit sweep table; all runs must share the grid and snapshot
/// schedule with the limit run.
ConvergenceReport convergence_report(const std::vector<KineticRun>& runs,
                                     const LimitRun& limit, const Region& K);

/// Total L1 mass of the density.
double mass(const KineticState& state);
double mass(const Field& rho, const Grid& grid);

struct BarrierAudit {
  double lower_margin = std::numeric_limits<double>::infinity();  ///< min u_i - psi/4n
  double upper_margin = -std::numeric_limits<double>::infinity(); ///< max u_i - 3 psibar/4n
  double worst_time = 0.0;
  Index worst_cell = -1;
  bool has_lower = false, has_upper = false;
};

/// Checks Prop-7.7/7.12-style persistence of barrier bounds over a run's
/// snapshots on a region. Verifies the initial-data precondition first.
BarrierAudit barrier_bound_audit(const KineticRun& run, const BarrierSpec* lower,
                                 const BarrierSpec* upper, const Region& K);

/// Entropy series: integral of sum_i log(u_i) phi^2 per snapshot. Exposed for
/// inspection, not asserted.
std::vector<std::pair<double, double>> entropy_series(const KineticRun& run,
                                                      const TestCutoff& phi);

}  // namespace carleman
