#include "carleman/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carleman {

double diffusivity(const ModelParams& params, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("diffusivity: rho must be > 0");
  return pow_fast(static_cast<double>(params.n), params.alpha - 1.0) *
         pow_fast(rho, -params.alpha);
}

namespace {

// One conservative update: rho += dt/dx^2 sum_axes (F_right - F_left) with
// F = mean(D) * (rho_nb - rho). Fluxes are formed once per face so the
// periodic total is conserved to rounding.
void explicit_step(Field& rho, const Grid& g, const ModelParams& params,
                   double dt, double floor_, const ScalarFarField* ff) {
  const double coef = dt / (g.dx * g.dx);
  Field out = rho;
  const auto st = g.strides();
  const bool periodic = g.boundary == Boundary::periodic;

  for (int axis = 0; axis < g.n; ++axis) {
    const Index ext = g.cells[axis];
    const Index stride = st[axis];
    for (Index i = 0; i < g.cells[0]; ++i)
      for (Index j = 0; j < g.cells[1]; ++j)
        for (Index k = 0; k < g.cells[2]; ++k) {
          const std::array<Index, 3> m{i, j, k};
          const Index idx = g.flat(i, j, k);
          if (m[axis] == ext - 1 && !periodic) continue;  // faces owned by left cell
          // face between m and m+1 on this axis
          double rho_r;
          Index idx_r = -1;
          if (m[axis] == ext - 1) {
            idx_r = idx - (ext - 1) * stride;
            rho_r = rho[idx_r];
          } else {
            idx_r = idx + stride;
            rho_r = rho[idx_r];
          }
          const double dl = diffusivity(params, std::max(rho[idx], floor_));
          const double dr = diffusivity(params, std::max(rho_r, floor_));
          const double flux = 0.5 * (dl + dr) * (rho_r - rho[idx]);
          out[idx] += coef * flux;
          out[idx_r] -= coef * flux;
        }
    if (!periodic) {
      // domain faces read the frozen analytic profile one cell outside
      for (Index i = 0; i < g.cells[0]; ++i)
        for (Index j = 0; j < g.cells[1]; ++j)
          for (Index k = 0; k < g.cells[2]; ++k) {
            const std::array<Index, 3> m{i, j, k};
            if (m[axis] != 0 && m[axis] != ext - 1) continue;
            const Index idx = g.flat(i, j, k);
            for (int side = 0; side < 2; ++side) {
              if ((side == 0 && m[axis] != 0) || (side == 1 && m[axis] != ext - 1))
                continue;
              std::array<Index, 3> gm = m;
              gm[axis] = side == 0 ? Index{-1} : ext;
              Point x = Point::Zero();
              for (int a = 0; a < g.n; ++a)
                x[a] = g.origin[a] + (gm[a] + 0.5) * g.dx;
              const double ghost = (*ff)(x);
              const double dl = diffusivity(params, std::max(rho[idx], floor_));
              const double dg = diffusivity(params, std::max(ghost, floor_));
              const double flux = 0.5 * (dl + dg) * (ghost - rho[idx]);
              out[idx] += coef * flux;
            }
          }
    }
  }
  rho = out;
}

}  // namespace

LimitRun advance_limit(const Field& rho0, const ModelParams& params,
                       const Grid& grid, double t_end,
                       const std::vector<double>& snapshot_times,
                       const LimitOptions& opts, const ScalarFarField* ff) {
  params.validate();
  if (grid.boundary == Boundary::frozen_far_field && ff == nullptr)
    throw std::invalid_argument(
        "advance_limit: frozen_far_field needs the analytic initial profile");
  if ((rho0 < opts.density_floor).any())
    throw std::invalid_argument("advance_limit: initial density under the floor");

  LimitRun run;
  run.params = params;
  run.grid = grid;

  std::vector<double> marks = snapshot_times;
  marks.push_back(t_end);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  Field rho = rho0;
  double t = 0.0;
  auto snapshot_if_requested = [&](double time) {
    for (double s : snapshot_times)
      if (std::abs(s - time) <= 1e-12 * std::max(1.0, std::abs(s))) {
        run.snapshots.push_back({time, rho});
        return;
      }
  };
  snapshot_if_requested(0.0);

  for (double mark : marks) {
    if (mark <= t + 1e-15) continue;
    if (mark > t_end + 1e-12) break;
    while (t < mark - 1e-15) {
      // D is monotone in rho, so the extreme sits at min or max of the field
      const double d_hi = diffusivity(params, std::max(rho.maxCoeff(), opts.density_floor));
      const double d_lo = diffusivity(params, std::max(rho.minCoeff(), opts.density_floor));
      const double dmax = std::max(d_hi, d_lo);
      double dt = opts.cfl * grid.dx * grid.dx / (2.0 * params.n * dmax);
      if (dt < opts.min_dt)
        throw std::runtime_error("advance_limit: stable dt underflow (D blew up)");
      dt = std::min(dt, mark - t);
      explicit_step(rho, grid, params, dt, opts.density_floor, ff);
      rho = rho.max(opts.density_floor);
      t += dt;
      run.dt_log.push_back(dt);
      ++run.steps;
    }
    t = mark;
    snapshot_if_requested(mark);
  }
  return run;
}

}  // namespace carleman
