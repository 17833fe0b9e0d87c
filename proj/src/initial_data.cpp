#include "carleman/initial_data.hpp"

#include <cmath>
#include <stdexcept>

namespace carleman {

double Primitive::eval(const Point& x, int n) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::power_tail: {
      double r = 0.0;
      for (int a = 0; a < n; ++a) r += x[a] * x[a];
      r = std::sqrt(r);
      return value / (std::pow(r, exponent) + std::pow(core, exponent));
    }
    case Kind::gaussian_bump: {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
      return value * std::exp(-s / (width * width));
    }
    case Kind::barrier_trace:
      return scale * psi_eval(*barrier, x, 0.0);
  }
  return 0.0;
}

Primitive constant_primitive(double c) {
  if (c < 0.0) throw std::invalid_argument("initial data: negative constant");
  Primitive p;
  p.kind = Primitive::Kind::constant;
  p.value = c;
  return p;
}

Primitive power_tail(double A, double p, double core) {
  if (A < 0.0 || !(p > 0.0) || !(core > 0.0))
    throw std::invalid_argument("initial data: bad power tail");
  Primitive q;
  q.kind = Primitive::Kind::power_tail;
  q.value = A;
  q.exponent = p;
  q.core = core;
  return q;
}

Primitive gaussian_bump(double amp, double width, const Point& center) {
  if (amp < 0.0 || !(width > 0.0))
    throw std::invalid_argument("initial data: bad gaussian bump");
  Primitive q;
  q.kind = Primitive::Kind::gaussian_bump;
  q.value = amp;
  q.width = width;
  q.center = center;
  return q;
}

Primitive barrier_trace(const BarrierSpec& spec, double scale) {
  if (scale < 0.0) throw std::invalid_argument("initial data: negative scale");
  Primitive q;
  q.kind = Primitive::Kind::barrier_trace;
  q.barrier = spec.resolved();
  q.scale = scale;
  return q;
}

double ComponentRecipe::eval(const Point& x, int n) const {
  double v = 0.0;
  for (const Primitive& p : parts) v += p.eval(x, n);
  return v;
}

InitialDataSpec isotropic_data(int n, const ComponentRecipe& recipe) {
  InitialDataSpec s;
  s.g.assign(2 * n, recipe);
  return s;
}

void add_l1_perturbation(InitialDataSpec& spec, int component, int n,
                         const Primitive& bump) {
  if (component < 0 || component >= static_cast<int>(spec.g.size()))
    throw std::invalid_argument("add_l1_perturbation: component out of range");
  if (bump.kind != Primitive::Kind::gaussian_bump)
    throw std::invalid_argument("add_l1_perturbation: bumps must be gaussian");
  if (spec.f.empty()) spec.f = spec.g;  // freeze the envelope first
  spec.g[component].parts.push_back(bump);
  // integral of amp exp(-|x|^2/w^2) over R^n
  spec.l1_budget +=
      bump.value * std::pow(bump.width * std::sqrt(M_PI), n);
}

std::vector<Field> build(const InitialDataSpec& spec, const Grid& grid,
                         const ModelParams& params) {
  const int n2 = params.velocity_count();
  if (static_cast<int>(spec.g.size()) != n2)
    throw std::invalid_argument("build: need one recipe per component");

  if (params.alpha >= 2.0 / params.n && params.alpha <= 1.0) {
    auto check = [&](const std::vector<ComponentRecipe>& rs) {
      for (const ComponentRecipe& r : rs)
        for (const Primitive& p : r.parts)
          if (p.kind == Primitive::Kind::power_tail &&
              p.exponent > 2.0 / params.alpha + 1e-9)
            throw std::invalid_argument(
                "build: power tail decays faster than |x|^(-2/alpha); data "
                "leaves the admissible class for this alpha");
    };
    check(spec.g);
    check(spec.f);
  }

  std::vector<Field> out(n2, Field(grid.size()));
  for (int i = 0; i < n2; ++i)
    for (Index idx = 0; idx < grid.size(); ++idx)
      out[i][idx] = spec.g[i].eval(grid.center(idx), params.n);
  return out;
}

SandwichResult sandwich_truncate(const std::vector<Field>& g, const Grid& grid,
                                 double m, const BarrierSpec& lower,
                                 const BarrierSpec& upper,
                                 const ModelParams& params) {
  if (!(m > 0.0)) throw std::invalid_argument("sandwich_truncate: level m > 0");
  BarrierSpec lo = lower.resolved();
  BarrierSpec hi = upper.resolved();
  lo.R = m;
  hi.R = m;
  const double n2 = 2.0 * params.n;
  Field lo_field = psi_field(lo, grid, 0.0) * (3.0 / (2.0 * n2));
  Field hi_field = psi_field(hi, grid, 0.0) * (1.0 / (2.0 * n2));
  if ((lo_field > hi_field).any())
    throw std::invalid_argument("sandwich_truncate: barriers cross at t = 0");

  SandwichResult res;
  res.g_m.reserve(g.size());
  double gap = 0.0;
  for (const Field& f : g) {
    Field clipped = f.max(lo_field).min(hi_field);
    gap += (clipped - f).abs().sum();
    res.g_m.push_back(std::move(clipped));
  }
  res.l1_gap = gap * grid.cell_volume();
  return res;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PrimTail {
  double power = 0.0;  ///< limit of |x|^(2/alpha) p(x); exact limit exists
  double logcoef = 0.0;
};

// decay power p and coefficient A of a primitive behaving like A |x|^-p,
// or growth forms signalled directly
PrimTail primitive_tail(const Primitive& p, const ModelParams& params) {
  PrimTail t;
  const double two_over_a = 2.0 / params.alpha;  // sign follows alpha
  auto power_limit = [&](double coef, double decay_p) {
    // limit of |x|^(2/alpha) * coef |x|^(-decay_p)
    if (params.alpha > 0.0) {
      if (std::abs(decay_p - two_over_a) < 1e-12) return coef;
      return decay_p > two_over_a ? 0.0 : kInf;
    }
    if (params.alpha < 0.0) {
      // two_over_a < 0; growing primitives use negative decay_p
      if (std::abs(decay_p - two_over_a) < 1e-12) return coef;
      return decay_p > two_over_a ? 0.0 : kInf;
    }
    return 0.0;
  };

  switch (p.kind) {
    case Primitive::Kind::constant:
      if (p.value > 0.0) t.power = power_limit(p.value, 0.0);
      return t;
    case Primitive::Kind::power_tail:
      t.power = power_limit(p.value, p.exponent);
      return t;
    case Primitive::Kind::gaussian_bump:
      return t;  // decays faster than any power
    case Primitive::Kind::barrier_trace: {
      const BarrierSpec& b = *p.barrier;
      switch (b.kind) {
        case BarrierCase::fde_supercritical:
        case BarrierCase::fde_critical:
        case BarrierCase::fde_subcritical: {
          const double C = barrier_constants(b.kind, b.n, b.alpha).C_alpha;
          const double coef = p.scale * C * std::pow(b.T, 1.0 / b.alpha);
          t.power = power_limit(coef, 2.0 / b.alpha);
          return t;
        }
        case BarrierCase::heat_gaussian:
        case BarrierCase::pme_separable:
          return t;  // decays fast / compact: all limits 0
        case BarrierCase::super_pme: {
          // grows like C T^(1/alpha_b) |x|^(-2/alpha_b), -2/alpha_b > 0
          const double C = barrier_constants(b.kind, b.n, b.alpha).C_alpha;
          const double coef = p.scale * C * std::pow(b.T, 1.0 / b.alpha);
          t.power = power_limit(coef, 2.0 / b.alpha);
          return t;
        }
        case BarrierCase::super_heat:
        case BarrierCase::super_fde:
          t.power = kInf;  // exponential growth beats any power
          t.logcoef = b.resolved().c_hat * b.n / (4.0 * b.T);
          return t;
      }
      return t;
    }
  }
  return t;
}

}  // namespace

TailInfo tail_info(const ComponentRecipe& recipe, const ModelParams& params) {
  TailInfo info;
  double power_sum = 0.0;
  double log_max = 0.0;
  for (const Primitive& p : recipe.parts) {
    const PrimTail t = primitive_tail(p, params);
    power_sum += t.power;  // inf propagates
    log_max = std::max(log_max, t.logcoef);
  }
  info.liminf_power = power_sum;
  info.limsup_power = power_sum;
  info.limsup_log = log_max;
  return info;
}

Horizons horizon_estimate(const InitialDataSpec& spec, const ModelParams& params) {
  params.validate();
  Horizons h;
  const int n2 = params.velocity_count();
  if (static_cast<int>(spec.g.size()) != n2)
    throw std::invalid_argument("horizon_estimate: need one recipe per component");

  const double a = params.alpha;
  auto pow_convention = [](double base, double expo) {
    // negative power of zero is infinity; infinity^negative is zero
    if (base == 0.0) return expo < 0.0 ? kInf : 0.0;
    if (std::isinf(base)) return expo < 0.0 ? 0.0 : kInf;
    return std::pow(base, expo);
  };

  if (a >= 2.0 / params.n && a <= 1.0) {
    double mn = kInf;
    for (int i = 0; i < n2; ++i)
      mn = std::min(mn, tail_info(spec.envelope(i), params).liminf_power);
    h.T1 = pow_convention(mn, 1.0 / a);
  }

  if (a >= 0.0) {
    double mx = 0.0;
    for (int i = 0; i < n2; ++i)
      mx = std::max(mx, tail_info(spec.envelope(i), params).limsup_log);
    h.T2 = pow_convention(mx, -1.0);
  } else {
    double mx = 0.0;
    for (int i = 0; i < n2; ++i)
      mx = std::max(mx, tail_info(spec.envelope(i), params).limsup_power);
    h.T2 = pow_convention(mx, 1.0 / a);
  }
  return h;
}

}  // namespace carleman
