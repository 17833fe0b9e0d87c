#include "carleman/model.hpp"

#include <cmath>
#include <stdexcept>

namespace carleman {

void ModelParams::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("params: n must be 1, 2 or 3");
  if (std::abs(alpha) > 1.0)
    throw std::invalid_argument("params: |alpha| must be <= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("params: epsilon must be > 0");
}

KineticState make_state(const Grid& grid, int n, double t) {
  KineticState s;
  s.grid = grid;
  s.t = t;
  s.u.assign(2 * n, Field::Zero(grid.size()));
  return s;
}

MacroState moments(const KineticState& state, const ModelParams& params) {
  const int n = params.n;
  const int n2 = 2 * n;
  if (state.components() != n2)
    throw std::invalid_argument("moments: component count does not match params");
  MacroState m;
  m.t = state.t;
  m.rho = Field::Zero(state.grid.size());
  for (const Field& f : state.u) m.rho += f;
  m.rho_pair.reserve(n);
  m.current.reserve(n);
  for (int i = 0; i < n; ++i) {
    m.rho_pair.push_back(state.u[i] + state.u[i + n]);
    m.current.push_back((state.u[i] - state.u[i + n]) / params.epsilon);
  }
  m.current_pair.assign(n2, std::vector<Field>());
  for (int i = 0; i < n2; ++i) {
    m.current_pair[i].reserve(n2);
    for (int j = 0; j < n2; ++j)
      m.current_pair[i].push_back((state.u[i] - state.u[j]) / params.epsilon);
  }
  return m;
}

Field total_density(const KineticState& state) {
  Field rho = Field::Zero(state.grid.size());
  for (const Field& f : state.u) rho += f;
  return rho;
}

KineticState reconstruct(const MacroState& macro, const Grid& grid,
                         const ModelParams& params) {
  KineticState s = make_state(grid, params.n, macro.t);
  for (int i = 0; i < params.n; ++i) {
    s.u[i] = 0.5 * (macro.rho_pair[i] + params.epsilon * macro.current[i]);
    s.u[i + params.n] = 0.5 * (macro.rho_pair[i] - params.epsilon * macro.current[i]);
  }
  return s;
}

namespace {

double reduce_norm(const Field& f, const std::vector<Index>& cells, double vol,
                   Norm which) {
  double acc = 0.0;
  switch (which) {
    case Norm::L1:
      for (Index c : cells) acc += std::abs(f[c]);
      return acc * vol;
    case Norm::L2:
      for (Index c : cells) acc += f[c] * f[c];
      return std::sqrt(acc * vol);
    case Norm::Linf:
      for (Index c : cells) acc = std::max(acc, std::abs(f[c]));
      return acc;
  }
  return acc;
}

}  // namespace

double norm_on(const Field& f, const Grid& grid, const Region& region, Norm which) {
  const auto cells = cells_in_region(grid, region);
  return reduce_norm(f, cells, grid.cell_volume(), which);
}

double norm_on(const std::vector<Field>& fs, const Grid& grid,
               const Region& region, Norm which) {
  const auto cells = cells_in_region(grid, region);
  const double vol = grid.cell_volume();
  double acc = 0.0;
  for (const Field& f : fs) {
    const double v = reduce_norm(f, cells, vol, which);
    if (which == Norm::L1)
      acc += v;
    else if (which == Norm::L2)
      acc += v * v;
    else
      acc = std::max(acc, v);
  }
  return which == Norm::L2 ? std::sqrt(acc) : acc;
}

Region whole_domain(const Grid& grid) {
  Region r;
  r.shape = Region::Shape::box;
  for (int a = 0; a < grid.n; ++a)
    r.center[a] = grid.origin[a] + 0.5 * grid.extent(a);
  double rad = 0.0;
  for (int a = 0; a < grid.n; ++a) rad = std::max(rad, 0.5 * grid.extent(a));
  r.radius = rad + grid.dx;  // covers every center
  r.t0 = 0.0;
  r.t1 = std::numeric_limits<double>::infinity();
  return r;
}

Region centered_box(const Grid& grid, double fraction) {
  Region r;
  r.shape = Region::Shape::box;
  double rad = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.n; ++a) {
    r.center[a] = grid.origin[a] + 0.5 * grid.extent(a);
    rad = std::min(rad, 0.5 * fraction * grid.extent(a));
  }
  r.radius = rad;
  r.t0 = 0.0;
  r.t1 = std::numeric_limits<double>::infinity();
  return r;
}

double TestCutoff::operator()(const Point& x, int n) const {
  if (kind == Kind::smooth_bump) {
    double s2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double d = (x[a] - center[a]) / radius;
      s2 += d * d;
    }
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
  }
  double phi = 1.0;
  for (int a = 0; a < n; ++a) {
    const double s = (x[a] - center[a]) / radius;
    if (std::abs(s) >= 1.0) return 0.0;
    const double c = std::cos(0.5 * M_PI * s);
    phi *= c * c;
  }
  return phi;
}

Field sample_cutoff(const TestCutoff& phi, const Grid& grid) {
  Field f(grid.size());
  for (Index idx = 0; idx < grid.size(); ++idx)
    f[idx] = phi(grid.center(idx), grid.n);
  return f;
}

}  // namespace carleman
