#include "carleman/kinetic_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carleman/parallel.hpp"

namespace carleman {

namespace {

// ---------------------------------------------------------------- streaming

void stream_component(const Grid& g, int axis, double dir, const Field& src,
                      Field& dst, int comp, const FarField* far_field) {
  const auto st = g.strides();
  const Index ext = g.cells[axis];
  const Index stride = st[axis];
  const bool periodic = g.boundary == Boundary::periodic;
  const int d = dir > 0 ? 1 : -1;

  for (Index i = 0; i < g.cells[0]; ++i)
    for (Index j = 0; j < g.cells[1]; ++j)
      for (Index k = 0; k < g.cells[2]; ++k) {
        const Index idx = g.flat(i, j, k);
        const std::array<Index, 3> m{i, j, k};
        const Index src_m = m[axis] - d;
        if (src_m >= 0 && src_m < ext) {
          dst[idx] = src[idx - d * stride];
        } else if (periodic) {
          dst[idx] = src[idx - d * stride + (d > 0 ? ext : -ext) * stride];
        } else {
          std::array<Index, 3> gm = m;
          gm[axis] = src_m;  // one cell outside the domain
          Point x = Point::Zero();
          for (int a = 0; a < g.n; ++a)
            x[a] = g.origin[a] + (gm[a] + 0.5) * g.dx;
          dst[idx] = (*far_field)(comp, x);
        }
      }
}

// ---------------------------------------------------------------- collision

// Collision map and Jacobian on a fixed-size cell vector. Rates see values
// clamped to the floor when alpha < 0; differences use the raw values.
template <int N2>
void cell_A(const RateSpec& spec, const Eigen::Matrix<double, N2, 1>& w,
            Eigen::Matrix<double, N2, 1>& out, double floor_) {
  const double a = spec.alpha;
  const bool clamp = a < 0.0;
  switch (spec.kind) {
    case RateKind::power_sum:
      for (int i = 0; i < N2; ++i) {
        const double wi = clamp ? std::max(w[i], floor_) : w[i];
        double acc = 0.0;
        for (int j = 0; j < N2; ++j) {
          if (j == i) continue;
          const double wj = clamp ? std::max(w[j], floor_) : w[j];
          acc += pow_fast(wi + wj, a) * (w[j] - w[i]);
        }
        out[i] = acc;
      }
      break;
    case RateKind::mean_field: {
      double rho = w.sum();
      if (clamp) rho = std::max(rho, floor_);
      const double k = pow_fast(rho, a);
      for (int i = 0; i < N2; ++i) out[i] = k * (w.sum() - N2 * w[i]);
      break;
    }
    case RateKind::power_difference: {
      const double p = a + 1.0;
      double sum = 0.0;
      Eigen::Matrix<double, N2, 1> pw;
      for (int j = 0; j < N2; ++j) {
        const double wj = clamp ? std::max(w[j], floor_) : w[j];
        pw[j] = pow_fast(wj, p);
        sum += pw[j];
      }
      for (int i = 0; i < N2; ++i) out[i] = sum - N2 * pw[i];
      break;
    }
  }
}

template <int N2>
void cell_DA(const RateSpec& spec, const Eigen::Matrix<double, N2, 1>& w,
             Eigen::Matrix<double, N2, N2>& J, double floor_) {
  const double a = spec.alpha;
  const bool clamp = a < 0.0;
  switch (spec.kind) {
    case RateKind::power_sum:
      for (int i = 0; i < N2; ++i) {
        const double wi = clamp ? std::max(w[i], floor_) : w[i];
        double dii = 0.0;
        for (int j = 0; j < N2; ++j) {
          if (j == i) continue;
          const double wj = clamp ? std::max(w[j], floor_) : w[j];
          const double s = wi + wj;
          const double k = pow_fast(s, a);
          const double dk = a == 0.0 ? 0.0 : a * pow_fast(s, a - 1.0);
          const double diff = w[j] - w[i];
          dii += dk * diff - k;
          J(i, j) = dk * diff + k;
        }
        J(i, i) = dii;
      }
      break;
    case RateKind::mean_field: {
      const double rho_raw = w.sum();
      const double rho = clamp ? std::max(rho_raw, floor_) : rho_raw;
      const double k = pow_fast(rho, a);
      const double dk = a == 0.0 ? 0.0 : a * pow_fast(rho, a - 1.0);
      for (int i = 0; i < N2; ++i)
        for (int j = 0; j < N2; ++j)
          J(i, j) = dk * (rho_raw - N2 * w[i]) + k * (1.0 - (i == j ? N2 : 0.0));
      break;
    }
    case RateKind::power_difference: {
      const double p = a + 1.0;
      for (int i = 0; i < N2; ++i)
        for (int j = 0; j < N2; ++j) {
          const double wj = clamp ? std::max(w[j], floor_) : w[j];
          const double dj = p == 0.0 ? 0.0 : p * pow_fast(wj, a);
          double v = dj;
          if (i == j) {
            const double wi = clamp ? std::max(w[i], floor_) : w[i];
            v -= N2 * (p == 0.0 ? 0.0 : p * pow_fast(wi, a));
          }
          J(i, j) = v;
        }
      break;
    }
  }
}

struct CellResult {
  int iters = 0;
  long clips = 0;
  bool ok = true;
};

// Backward Euler on one cell: w = u + gamma A(w), damped Newton with the
// equilibrium-rate linearization as predictor. On failure the step is split
// in two recursively.
template <int N2>
CellResult collide_cell(const RateSpec& spec, Eigen::Matrix<double, N2, 1>& u,
                        double gamma, const SolverOptions& opts, int depth) {
  using Vec = Eigen::Matrix<double, N2, 1>;
  using Mat = Eigen::Matrix<double, N2, N2>;
  CellResult res;

  const double rho = u.sum();
  if (rho <= N2 * opts.density_floor) return res;  // vacuum cell is equilibrium

  const double keq = equilibrium_rate(spec, rho, N2 / 2);
  const double r = N2 * gamma * keq;
  const double mean = rho / N2;
  Vec w = (u.array() + r * mean).matrix() / (1.0 + r);
  w = w.cwiseMax(0.0);

  Vec A, F;
  cell_A<N2>(spec, w, A, opts.density_floor);
  F = w - u - gamma * A;
  double fnorm = F.template lpNorm<Eigen::Infinity>();
  int it = 0;
  while (fnorm > opts.newton_tol) {
    if (it >= opts.max_newton_iters) {
      res.ok = false;
      break;
    }
    Mat J;
    cell_DA<N2>(spec, w, J, opts.density_floor);
    Mat M = Mat::Identity() - gamma * J;
    Vec delta = M.partialPivLu().solve(-F);
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Vec wn = w + lambda * delta;
      if ((wn.array() >= 0.0).all()) {
        Vec An, Fn;
        cell_A<N2>(spec, wn, An, opts.density_floor);
        Fn = wn - u - gamma * An;
        const double fn = Fn.template lpNorm<Eigen::Infinity>();
        if (fn <= (1.0 - 0.25 * lambda) * fnorm || fn <= opts.newton_tol) {
          w = wn;
          A = An;
          F = Fn;
          fnorm = fn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    ++it;
    if (!accepted) {
      res.ok = false;
      break;
    }
  }
  res.iters = it;

  if (!res.ok) {
    if (depth >= opts.max_dt_halvings) return res;
    Vec half = u;
    CellResult r1 = collide_cell<N2>(spec, half, gamma * 0.5, opts, depth + 1);
    if (!r1.ok) return r1;
    CellResult r2 = collide_cell<N2>(spec, half, gamma * 0.5, opts, depth + 1);
    if (!r2.ok) return r2;
    u = half;
    CellResult out;
    out.iters = std::max(r1.iters, r2.iters);
    out.clips = r1.clips + r2.clips;
    return out;
  }

  // final update through the map itself: the antisymmetric pair terms cancel
  // bitwise in the component sum
  u += gamma * A;
  for (int i = 0; i < N2; ++i)
    if (u[i] < 0.0) {
      u[i] = 0.0;
      ++res.clips;
    }
  return res;
}

template <int N2>
void collide_all(const RateSpec& spec, std::vector<Field>& u, double gamma,
                 const SolverOptions& opts, int& iters_max, long& clips) {
  const Index total = u[0].size();
  const Index nchunks = chunk_count(total);
  std::vector<int> chunk_iters(nchunks, 0);
  std::vector<long> chunk_clips(nchunks, 0);
  std::vector<std::string> chunk_error(nchunks);

  parallel_chunks(total, opts.threads, [&](Index c, Index begin, Index end) {
    Eigen::Matrix<double, N2, 1> w;
    for (Index idx = begin; idx < end; ++idx) {
      for (int i = 0; i < N2; ++i) w[i] = u[i][idx];
      CellResult r = collide_cell<N2>(spec, w, gamma, opts, 0);
      if (!r.ok) {
        std::ostringstream os;
        os << "collision Newton failed at cell " << idx << " (u =";
        for (int i = 0; i < N2; ++i) os << " " << u[i][idx];
        os << ", gamma = " << gamma << ", alpha = " << spec.alpha << ")";
        chunk_error[c] = os.str();
        return;
      }
      chunk_iters[c] = std::max(chunk_iters[c], r.iters);
      chunk_clips[c] += r.clips;
      for (int i = 0; i < N2; ++i) u[i][idx] = w[i];
    }
  });

  for (Index c = 0; c < nchunks; ++c) {
    if (!chunk_error[c].empty()) throw std::runtime_error(chunk_error[c]);
    iters_max = std::max(iters_max, chunk_iters[c]);
    clips += chunk_clips[c];
  }
}

double total_mass(const std::vector<Field>& u, const Grid& g, int threads) {
  const Index total = u[0].size();
  const Index nchunks = chunk_count(total);
  std::vector<double> partial(nchunks, 0.0);
  parallel_chunks(total, threads, [&](Index c, Index begin, Index end) {
    double acc = 0.0;
    for (const Field& f : u)
      for (Index idx = begin; idx < end; ++idx) acc += f[idx];
    partial[c] = acc;
  });
  double m = 0.0;
  for (double p : partial) m += p;
  return m * g.cell_volume();
}

}  // namespace

KineticState stream_step(const KineticState& state, const ModelParams& params,
                         const FarField* far_field) {
  if (state.grid.boundary == Boundary::frozen_far_field && far_field == nullptr)
    throw std::invalid_argument(
        "stream_step: frozen_far_field needs the analytic initial profile");
  KineticState next = state;
  next.t = state.t + params.epsilon * state.grid.dx;
  for (int i = 0; i < params.velocity_count(); ++i)
    stream_component(state.grid, params.axis(i), params.direction(i),
                     state.u[i], next.u[i], i, far_field);
  return next;
}

KineticState collide_step(const KineticState& state, const ModelParams& params,
                          const RateSpec& rate, double dt,
                          const SolverOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("collide_step: dt must be > 0");
  KineticState next = state;
  const double gamma =
      dt / (2.0 * params.n * params.epsilon * params.epsilon);
  int iters = 0;
  long clips = 0;
  switch (params.n) {
    case 1: collide_all<2>(rate, next.u, gamma, opts, iters, clips); break;
    case 2: collide_all<4>(rate, next.u, gamma, opts, iters, clips); break;
    case 3: collide_all<6>(rate, next.u, gamma, opts, iters, clips); break;
    default: throw std::invalid_argument("collide_step: n must be 1, 2 or 3");
  }
  return next;
}

KineticRun advance(const KineticState& initial, const ModelParams& params,
                   const RateSpec& rate, double t_end,
                   const std::vector<double>& snapshot_times,
                   const SolverOptions& opts, const FarField* far_field,
                   const std::optional<Region>& region_of_interest) {
  params.validate();
  const Grid& g = initial.grid;
  if (g.boundary == Boundary::frozen_far_field && far_field == nullptr)
    throw std::invalid_argument(
        "advance: frozen_far_field needs the analytic initial profile");

  const double dt = params.epsilon * g.dx;
  const long steps = static_cast<long>(std::floor(t_end / dt + 1e-9));

  KineticRun run;
  run.params = params;
  run.rate = rate;
  run.grid = g;

  if (g.boundary == Boundary::frozen_far_field && region_of_interest) {
    double dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.n; ++a) {
      const double lo = region_of_interest->center[a] - region_of_interest->radius;
      const double hi = region_of_interest->center[a] + region_of_interest->radius;
      dist = std::min(dist, lo - g.origin[a]);
      dist = std::min(dist, g.origin[a] + g.extent(a) - hi);
    }
    const double reach = t_end / params.epsilon;
    if (dist < reach) {
      run.dod_warning = true;
      std::ostringstream os;
      os << "region of interest is " << dist
         << " from the boundary but characteristics travel " << reach
         << " over the run; far-field values reach the region";
      run.dod_message = os.str();
    }
  }

  // map step index -> snapshot request
  std::vector<long> snap_steps;
  for (double s : snapshot_times) {
    long k = std::llround(s / dt);
    k = std::max<long>(0, std::min(steps, k));
    snap_steps.push_back(k);
  }

  KineticState state = initial;
  const double gamma = dt / (2.0 * params.n * params.epsilon * params.epsilon);

  auto record = [&](long step, int iters, long clips, double prev_mass) {
    StepLogEntry e;
    e.step = step;
    e.t = state.t;
    e.newton_iters_max = iters;
    e.positivity_clips = clips;
    e.mass = total_mass(state.u, g, opts.threads);
    e.mass_drift = e.mass - prev_mass;
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const Field& f : state.u) {
      mn = std::min(mn, f.minCoeff());
      mx = std::max(mx, f.maxCoeff());
    }
    e.min_u = mn;
    e.max_u = mx;
    run.log.push_back(e);
    return e.mass;
  };

  double mass_prev = record(0, 0, 0, 0.0);
  run.log.back().mass_drift = 0.0;

  auto snapshot_due = [&](long k) {
    for (long s : snap_steps)
      if (s == k) return true;
    return false;
  };
  if (snapshot_due(0)) run.snapshots.push_back(state);

  for (long k = 1; k <= steps; ++k) {
    state = stream_step(state, params, far_field);
    int iters = 0;
    long clips = 0;
    switch (params.n) {
      case 1: collide_all<2>(rate, state.u, gamma, opts, iters, clips); break;
      case 2: collide_all<4>(rate, state.u, gamma, opts, iters, clips); break;
      case 3: collide_all<6>(rate, state.u, gamma, opts, iters, clips); break;
    }
    state.t = k * dt;  // avoid accumulation drift
    mass_prev = record(k, iters, clips, mass_prev);
    if (snapshot_due(k)) run.snapshots.push_back(state);
  }
  return run;
}

void KineticRun::write_step_log_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "step,t,newton_iters_max,mass,min_u,max_u,positivity_clips,mass_drift\n";
  char buf[256];
  for (const StepLogEntry& e : log) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%d,%.17g,%.17g,%.17g,%ld,%.17g\n",
                  e.step, e.t, e.newton_iters_max, e.mass, e.min_u, e.max_u,
                  e.positivity_clips, e.mass_drift);
    os << buf;
  }
}

}  // namespace carleman
