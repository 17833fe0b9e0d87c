#include "carleman/diagnostics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carleman {

namespace {

void check_same_grid(const Grid& a, const Grid& b) {
  if (a.n != b.n || a.cells != b.cells || a.dx != b.dx || a.origin != b.origin)
    throw std::invalid_argument("diagnostics: grids do not match");
}

}  // namespace

double positive_part_l1(const KineticState& u, const KineticState& v) {
  check_same_grid(u.grid, v.grid);
  if (u.components() != v.components())
    throw std::invalid_argument("diagnostics: component counts differ");
  double acc = 0.0;
  for (int i = 0; i < u.components(); ++i)
    acc += (u.u[i] - v.u[i]).max(0.0).sum();
  return acc * u.grid.cell_volume();
}

double ordering_margin(const KineticState& u, const KineticState& v) {
  check_same_grid(u.grid, v.grid);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < u.components(); ++i)
    margin = std::min(margin, (v.u[i] - u.u[i]).minCoeff());
  return margin;
}

FluxL2 flux_l2(const KineticRun& run, const TestCutoff& phi) {
  const Grid& g = run.grid;
  for (int a = 0; a < g.n; ++a) {
    if (phi.center[a] - phi.radius < g.origin[a] ||
        phi.center[a] + phi.radius > g.origin[a] + g.extent(a))
      throw std::invalid_argument("flux_l2: cutoff support leaves the grid");
  }
  return flux_l2(run, sample_cutoff(phi, g));
}

FluxL2 flux_l2(const KineticRun& run, const Field& phi) {
  if (run.snapshots.size() < 2)
    throw std::invalid_argument("flux_l2: need at least two snapshots");
  const Grid& g = run.grid;
  const Field phi2 = phi.square();
  const double eps = run.params.epsilon;
  const int n2 = run.params.velocity_count();

  auto integrand = [&](const KineticState& s, bool weighted) {
    double acc = 0.0;
    for (Index idx = 0; idx < g.size(); ++idx) {
      if (phi2[idx] == 0.0) continue;
      double cell = 0.0;
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) {
          if (i == j) continue;
          const double jij = (s.u[i][idx] - s.u[j][idx]) / eps;
          double w = 1.0;
          if (weighted) {
            const double k = rate(run.rate, s.u[i][idx], s.u[j][idx], run.params.n);
            w = k * k;
          }
          cell += w * jij * jij;
        }
      acc += cell * phi2[idx];
    }
    return acc * g.cell_volume();
  };

  FluxL2 out;
  for (size_t k = 0; k + 1 < run.snapshots.size(); ++k) {
    const double dt = run.snapshots[k + 1].t - run.snapshots[k].t;
    out.plain += 0.5 * dt * (integrand(run.snapshots[k], false) +
                             integrand(run.snapshots[k + 1], false));
    out.weighted += 0.5 * dt * (integrand(run.snapshots[k], true) +
                                integrand(run.snapshots[k + 1], true));
  }
  return out;
}

FicksResidual ficks_residual(const KineticState& state, const ModelParams& params,
                             const RateSpec& rate_spec) {
  return ficks_residual(state, params, rate_spec, centered_box(state.grid, 0.5));
}

FicksResidual ficks_residual(const KineticState& state, const ModelParams& params,
                             const RateSpec& rate_spec, const Region& region) {
  const Grid& g = state.grid;
  for (const Field& f : state.u)
    if ((f <= 0.0).any())
      throw std::domain_error("ficks_residual: state must be strictly positive");

  const Field rho = total_density(state);
  const auto cells = cells_in_region(g, region);
  const auto st = g.strides();
  FicksResidual out;
  out.per_axis_l2.assign(params.n, 0.0);

  for (int ax = 0; ax < params.n; ++ax) {
    const Index ext = g.cells[ax];
    const Index stride = st[ax];
    double acc = 0.0;
    for (Index idx : cells) {
      const auto m = g.unflatten(idx);
      double rm, rp;
      if (m[ax] == 0) {
        rp = rho[idx + stride];
        rm = g.boundary == Boundary::periodic ? rho[idx + (ext - 1) * stride]
                                              : 2.0 * rho[idx] - rp;
      } else if (m[ax] == ext - 1) {
        rm = rho[idx - stride];
        rp = g.boundary == Boundary::periodic ? rho[idx - (ext - 1) * stride]
                                              : 2.0 * rho[idx] - rm;
      } else {
        rm = rho[idx - stride];
        rp = rho[idx + stride];
      }
      const double grad = (rp - rm) / (2.0 * g.dx);
      const double j = (state.u[ax][idx] - state.u[ax + params.n][idx]) /
                       params.epsilon;
      const double k = equilibrium_rate(rate_spec, rho[idx], params.n);
      const double r = grad / params.n + k * j;
      acc += r * r;
    }
    out.per_axis_l2[ax] = std::sqrt(acc * g.cell_volume());
    out.total_l2 += acc * g.cell_volume();
  }
  out.total_l2 = std::sqrt(out.total_l2);
  return out;
}

ConvergenceReport convergence_report(const std::vector<KineticRun>& runs,
                                     const LimitRun& limit, const Region& K) {
  if (runs.empty()) throw std::invalid_argument("convergence_report: no runs");
  const Grid& g = limit.grid;
  const auto cells = cells_in_region(g, K);
  const double vol = g.cell_volume();

  ConvergenceReport rep;
  for (const KineticRun& run : runs) {
    check_same_grid(run.grid, g);
    if (run.snapshots.size() != limit.snapshots.size())
      throw std::invalid_argument("convergence_report: snapshot schedules differ");
    SweepRow row;
    row.epsilon = run.params.epsilon;
    const int n2 = run.params.velocity_count();
    for (size_t s = 0; s < run.snapshots.size(); ++s) {
      const KineticState& ks = run.snapshots[s];
      const LimitSnapshot& ls = limit.snapshots[s];
      if (std::abs(ks.t - ls.t) > 1e-9 * std::max(1.0, std::abs(ls.t)))
        throw std::invalid_argument("convergence_report: snapshot times differ");
      if (!K.contains_time(ks.t)) continue;
      const Field rho_eps = total_density(ks);
      double e = 0.0, gap = 0.0;
      for (int i = 0; i < n2; ++i) {
        double ei = 0.0, gi = 0.0;
        for (Index idx : cells) {
          ei += std::abs(ks.u[i][idx] - ls.rho[idx] / n2);
          gi += std::abs(ks.u[i][idx] - rho_eps[idx] / n2);
        }
        e += ei * vol;
        gap = std::max(gap, gi * vol);
      }
      row.e_value = std::max(row.e_value, e);
      row.isotropy_gap = std::max(row.isotropy_gap, gap);
    }
    rep.rows.push_back(row);
  }

  rep.e_strictly_decreasing = true;
  rep.gap_strictly_decreasing = true;
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    if (!(rep.rows[i + 1].e_value < rep.rows[i].e_value))
      rep.e_strictly_decreasing = false;
    if (!(rep.rows[i + 1].isotropy_gap < rep.rows[i].isotropy_gap))
      rep.gap_strictly_decreasing = false;
  }

  double mass_k = 0.0;
  for (Index idx : cells) mass_k += std::abs(limit.snapshots.back().rho[idx]);
  rep.limit_mass_on_region = mass_k * vol;
  return rep;
}

double mass(const KineticState& state) {
  double acc = 0.0;
  for (const Field& f : state.u) acc += f.sum();
  return acc * state.grid.cell_volume();
}

double mass(const Field& rho, const Grid& grid) {
  return rho.sum() * grid.cell_volume();
}

BarrierAudit barrier_bound_audit(const KineticRun& run, const BarrierSpec* lower,
                                 const BarrierSpec* upper, const Region& K) {
  if (run.snapshots.empty())
    throw std::invalid_argument("barrier_bound_audit: run has no snapshots");
  const Grid& g = run.grid;
  const double n2 = 2.0 * run.params.n;
  const auto cells = cells_in_region(g, whole_domain(g));
  const auto region_cells = cells_in_region(g, K);

  BarrierAudit audit;
  const KineticState& init = run.snapshots.front();
  if ((lower || upper) && std::abs(init.t) > 1e-12)
    throw std::invalid_argument(
        "barrier_bound_audit: the run needs a t = 0 snapshot to check the "
        "initial-data precondition");

  if (lower) {
    audit.has_lower = true;
    const Field psi0 = psi_field(*lower, g, 0.0);
    for (Index idx : cells)
      for (const Field& f : init.u)
        if (f[idx] < 3.0 / (2.0 * n2) * psi0[idx] - 1e-12) {
          std::ostringstream os;
          os << "barrier_bound_audit: initial data below (3/4n) Psi at cell "
             << idx << " (" << f[idx] << " < " << 3.0 / (2.0 * n2) * psi0[idx]
             << ")";
          throw std::invalid_argument(os.str());
        }
  }
  if (upper) {
    audit.has_upper = true;
    const Field psi0 = psi_field(*upper, g, 0.0);
    for (Index idx : cells)
      for (const Field& f : init.u)
        if (f[idx] > 1.0 / (2.0 * n2) * psi0[idx] + 1e-12) {
          std::ostringstream os;
          os << "barrier_bound_audit: initial data above (1/4n) PsiBar at cell "
             << idx;
          throw std::invalid_argument(os.str());
        }
  }

  for (const KineticState& s : run.snapshots) {
    if (!K.contains_time(s.t)) continue;
    if (lower && s.t < life_span(*lower)) {
      const Field psi = psi_field(*lower, g, s.t);
      for (Index idx : region_cells)
        for (const Field& f : s.u) {
          const double m = f[idx] - psi[idx] / (2.0 * n2);
          if (m < audit.lower_margin) {
            audit.lower_margin = m;
            audit.worst_time = s.t;
            audit.worst_cell = idx;
          }
        }
    }
    if (upper && s.t < life_span(*upper)) {
      const Field psi = psi_field(*upper, g, s.t);
      for (Index idx : region_cells)
        for (const Field& f : s.u) {
          const double m = f[idx] - 3.0 * psi[idx] / (2.0 * n2);
          if (m > audit.upper_margin) {
            audit.upper_margin = m;
            audit.worst_time = s.t;
            audit.worst_cell = idx;
          }
        }
    }
  }
  return audit;
}

std::vector<std::pair<double, double>> entropy_series(const KineticRun& run,
                                                      const TestCutoff& phi) {
  const Grid& g = run.grid;
  const Field phi2 = sample_cutoff(phi, g).square();
  std::vector<std::pair<double, double>> out;
  for (const KineticState& s : run.snapshots) {
    double acc = 0.0;
    for (const Field& f : s.u)
      for (Index idx = 0; idx < g.size(); ++idx)
        if (phi2[idx] > 0.0) acc += std::log(std::max(f[idx], kDensityFloor)) * phi2[idx];
    out.emplace_back(s.t, acc * g.cell_volume());
  }
  return out;
}

}  // namespace carleman
