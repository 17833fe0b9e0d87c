#include "carleman/barriers.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace carleman {

std::string to_string(BarrierCase c) {
  switch (c) {
    case BarrierCase::fde_supercritical: return "fde_supercritical";
    case BarrierCase::fde_critical: return "fde_critical";
    case BarrierCase::fde_subcritical: return "fde_subcritical";
    case BarrierCase::heat_gaussian: return "heat_gaussian";
    case BarrierCase::pme_separable: return "pme_separable";
    case BarrierCase::super_pme: return "super_pme";
    case BarrierCase::super_heat: return "super_heat";
    case BarrierCase::super_fde: return "super_fde";
  }
  return "?";
}

BarrierCase barrier_case_from_string(const std::string& s) {
  for (BarrierCase c :
       {BarrierCase::fde_supercritical, BarrierCase::fde_critical,
        BarrierCase::fde_subcritical, BarrierCase::heat_gaussian,
        BarrierCase::pme_separable, BarrierCase::super_pme,
        BarrierCase::super_heat, BarrierCase::super_fde})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown barrier case: " + s);
}

bool is_supersolution(BarrierCase c) {
  return c == BarrierCase::super_pme || c == BarrierCase::super_heat ||
         c == BarrierCase::super_fde;
}

namespace {

[[noreturn]] void incompatible(BarrierCase c, int n, double alpha) {
  std::ostringstream os;
  os << "barrier " << to_string(c) << " incompatible with n=" << n
     << ", alpha=" << alpha;
  throw std::invalid_argument(os.str());
}

double radial2(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a] * x[a];
  return s;
}

}  // namespace

BarrierConstants barrier_constants(BarrierCase kind, int n, double alpha) {
  BarrierConstants k;
  if (n < 2 || n > 3) incompatible(kind, n, alpha);
  switch (kind) {
    case BarrierCase::fde_supercritical: {
      if (n < 3 || !(alpha > 2.0 / n && alpha <= 1.0)) incompatible(kind, n, alpha);
      const double gap = n - 2.0 / alpha;
      k.C_alpha = std::pow(2.0 * std::pow(n, alpha - 1.0) * gap, 1.0 / alpha);
      k.c = 1.0 + 2.0 * (2.0 / alpha) / gap;
      break;
    }
    case BarrierCase::fde_critical: {
      if (std::abs(alpha - 2.0 / n) > 1e-12) incompatible(kind, n, alpha);
      k.C_alpha = std::pow(n, (alpha - 1.0) / alpha);
      k.c = 1.0;
      break;
    }
    case BarrierCase::fde_subcritical: {
      if (!(alpha > 0.0 && alpha < 2.0 / n)) incompatible(kind, n, alpha);
      k.C_alpha =
          std::pow(2.0 * std::pow(n, alpha - 1.0) * (2.0 / alpha - n), 1.0 / alpha);
      k.c = 1.0;
      break;
    }
    case BarrierCase::heat_gaussian:
      if (alpha != 0.0) incompatible(kind, n, alpha);
      k.c_hat = 1.25;
      k.c_bar = 1.5;
      k.c = 1.0;
      break;
    case BarrierCase::pme_separable:
    case BarrierCase::super_pme: {
      if (!(alpha >= -1.0 && alpha < 0.0)) incompatible(kind, n, alpha);
      k.C_alpha =
          std::pow(2.0 * std::pow(n, alpha - 1.0) * (n - 2.0 / alpha), 1.0 / alpha);
      k.c = kind == BarrierCase::super_pme ? 2.0 : 1.0;
      break;
    }
    case BarrierCase::super_heat:
      if (alpha != 0.0) incompatible(kind, n, alpha);
      k.c_hat = 0.75;
      k.c_bar = 1.0;
      k.c = 1.0;
      break;
    case BarrierCase::super_fde:
      if (!(alpha > 0.0 && alpha <= 1.0)) incompatible(kind, n, alpha);
      k.c_hat = 0.75;
      k.c_bar = 1.0;
      k.c = 1.0;
      break;
  }
  return k;
}

BarrierSpec BarrierSpec::resolved() const {
  BarrierSpec s = *this;
  const BarrierConstants k = barrier_constants(kind, n, alpha);
  if (s.c == 0.0) s.c = k.c;
  if (s.c_hat == 0.0) s.c_hat = k.c_hat;
  if (s.c_bar == 0.0) s.c_bar = k.c_bar;
  if (!(s.R > 0.0) || !(s.T > 0.0))
    throw std::invalid_argument("barrier: R and T must be positive");
  if (kind == BarrierCase::fde_supercritical) {
    const double gap = n - 2.0 / alpha;
    if (!(s.c - 1.0 > (2.0 / alpha) / gap))
      throw std::invalid_argument("barrier: speed constant too small for subsolution");
  }
  if (kind == BarrierCase::super_pme && !(s.c > 1.0))
    throw std::invalid_argument("barrier: super_pme needs c > 1");
  if (kind == BarrierCase::heat_gaussian && !(s.c_bar > s.c_hat && s.c_hat > 1.0))
    throw std::invalid_argument("barrier: heat case needs c_bar > c_hat > 1");
  if ((kind == BarrierCase::super_heat || kind == BarrierCase::super_fde) &&
      !(s.c_hat > 0.0 && s.c_hat < 1.0 && s.c_bar > s.c_hat))
    throw std::invalid_argument("barrier: super heat form needs 0 < c_hat < 1 < ... c_bar > c_hat");
  return s;
}

double life_span(const BarrierSpec& spec) {
  switch (spec.kind) {
    case BarrierCase::fde_supercritical:
    case BarrierCase::super_pme:
      return spec.T / (spec.c == 0.0 ? barrier_constants(spec.kind, spec.n, spec.alpha).c : spec.c);
    case BarrierCase::fde_critical:
    case BarrierCase::fde_subcritical:
    case BarrierCase::super_heat:
    case BarrierCase::super_fde:
      return spec.T;
    case BarrierCase::heat_gaussian:
    case BarrierCase::pme_separable:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

namespace {

void check_life(const BarrierSpec& spec, double t) {
  if (t < 0.0 || t >= life_span(spec)) {
    std::ostringstream os;
    os << "barrier " << to_string(spec.kind) << ": t=" << t
       << " outside life span [0, " << life_span(spec) << ")";
    throw std::domain_error(os.str());
  }
}

/// pme support threshold K = R^2 T^(2/(2-n alpha)).
double pme_support(const BarrierSpec& s) {
  return s.R * s.R * std::pow(s.T, 2.0 / (2.0 - s.n * s.alpha));
}

}  // namespace

PsiDerivs psi_derivs(const BarrierSpec& spec_in, const Point& x, double t) {
  const BarrierSpec spec = spec_in.resolved();
  check_life(spec, t);
  const int n = spec.n;
  const double a = spec.alpha;
  const double s2 = radial2(x, n);
  PsiDerivs d;

  switch (spec.kind) {
    case BarrierCase::fde_supercritical:
    case BarrierCase::super_pme:
    case BarrierCase::fde_critical:
    case BarrierCase::fde_subcritical: {
      // psi = C (N(t) / (s2 + W(t)))^(1/alpha)
      double C, N, dN_over_N, W, dW;
      if (spec.kind == BarrierCase::fde_supercritical ||
          spec.kind == BarrierCase::super_pme) {
        C = barrier_constants(spec.kind, n, a).C_alpha;
        N = spec.T - spec.c * t;
        dN_over_N = -spec.c / N;
        W = spec.R * spec.R;
        dW = 0.0;
      } else if (spec.kind == BarrierCase::fde_critical) {
        C = barrier_constants(spec.kind, n, a).C_alpha;
        N = spec.T * spec.T / (t + spec.T);
        dN_over_N = -1.0 / (t + spec.T);
        W = spec.R * spec.R * std::exp(4.0 * n * t / spec.T);
        dW = (4.0 * n / spec.T) * W;
      } else {
        C = barrier_constants(spec.kind, n, a).C_alpha;
        N = spec.T;
        dN_over_N = 0.0;
        const double p = 4.0 / (2.0 - n * a);
        W = spec.R * spec.R * std::pow(t + spec.T, p);
        dW = p * W / (t + spec.T);
      }
      const double S = s2 + W;
      d.psi = C * std::pow(N / S, 1.0 / a);
      const double g = -2.0 / (a * S);
      for (int ax = 0; ax < n; ++ax) {
        d.grad[ax] = g * x[ax] * d.psi;
        d.diag2[ax] = (g * (1.0 - 2.0 * x[ax] * x[ax] / S) +
                       (4.0 / (a * a)) * x[ax] * x[ax] / (S * S)) *
                      d.psi;
      }
      d.psi_t = (1.0 / a) * (dN_over_N - dW / S) * d.psi;
      break;
    }
    case BarrierCase::heat_gaussian:
    case BarrierCase::super_heat:
    case BarrierCase::super_fde: {
      const bool growing = spec.kind != BarrierCase::heat_gaussian;
      const double tau = growing ? spec.T - t : t + spec.T;
      const double sigma = growing ? 1.0 : -1.0;
      const double P = 0.5 * n * spec.c_bar;
      d.psi = spec.R * spec.R * std::pow(4.0 * M_PI * tau, -P) *
              std::exp(sigma * spec.c_hat * n * s2 / (4.0 * tau));
      const double g = sigma * spec.c_hat * n / (2.0 * tau);
      for (int ax = 0; ax < n; ++ax) {
        d.grad[ax] = g * x[ax] * d.psi;
        d.diag2[ax] = (g + g * g * x[ax] * x[ax]) * d.psi;
      }
      // d/dt log psi = -P tau'/tau - sigma c_hat n s2 tau' / (4 tau^2)
      const double taup = growing ? -1.0 : 1.0;
      d.psi_t =
          (-P * taup / tau - sigma * spec.c_hat * n * s2 * taup / (4.0 * tau * tau)) *
          d.psi;
      break;
    }
    case BarrierCase::pme_separable: {
      const double K = pme_support(spec);
      const double G = K - s2;
      if (G <= 0.0) return d;  // identically zero outside the support
      const double q = -1.0 / a;
      const double C = barrier_constants(spec.kind, n, a).C_alpha;
      const double tau = t + spec.T;
      d.psi = C * std::pow(G / tau, q);
      for (int ax = 0; ax < n; ++ax) {
        d.grad[ax] = -2.0 * q * x[ax] / G * d.psi;
        d.diag2[ax] =
            (-2.0 * q / G + 4.0 * q * (q - 1.0) * x[ax] * x[ax] / (G * G)) * d.psi;
      }
      d.psi_t = -q / tau * d.psi;
      break;
    }
  }
  return d;
}

double psi_eval(const BarrierSpec& spec_in, const Point& x, double t) {
  const BarrierSpec spec = spec_in.resolved();
  check_life(spec, t);
  const int n = spec.n;
  const double a = spec.alpha;
  const double s2 = radial2(x, n);
  switch (spec.kind) {
    case BarrierCase::fde_supercritical:
    case BarrierCase::super_pme: {
      const double C = barrier_constants(spec.kind, n, a).C_alpha;
      return C * std::pow((spec.T - spec.c * t) / (s2 + spec.R * spec.R), 1.0 / a);
    }
    case BarrierCase::fde_critical: {
      const double C = barrier_constants(spec.kind, n, a).C_alpha;
      const double W = spec.R * spec.R * std::exp(4.0 * n * t / spec.T);
      return C * std::pow(spec.T * spec.T / ((s2 + W) * (t + spec.T)), 1.0 / a);
    }
    case BarrierCase::fde_subcritical: {
      const double C = barrier_constants(spec.kind, n, a).C_alpha;
      const double W =
          spec.R * spec.R * std::pow(t + spec.T, 4.0 / (2.0 - n * a));
      return C * std::pow(spec.T / (s2 + W), 1.0 / a);
    }
    case BarrierCase::heat_gaussian:
      return spec.R * spec.R *
             std::pow(4.0 * M_PI * (t + spec.T), -0.5 * n * spec.c_bar) *
             std::exp(-spec.c_hat * n * s2 / (4.0 * (t + spec.T)));
    case BarrierCase::super_heat:
    case BarrierCase::super_fde:
      return spec.R * spec.R *
             std::pow(4.0 * M_PI * (spec.T - t), -0.5 * n * spec.c_bar) *
             std::exp(spec.c_hat * n * s2 / (4.0 * (spec.T - t)));
    case BarrierCase::pme_separable: {
      const double G = pme_support(spec) - s2;
      if (G <= 0.0) return 0.0;
      const double C = barrier_constants(spec.kind, n, a).C_alpha;
      return C * std::pow(G / (t + spec.T), -1.0 / a);
    }
  }
  return 0.0;
}

Field psi_field(const BarrierSpec& spec, const Grid& grid, double t) {
  Field f(grid.size());
  for (Index idx = 0; idx < grid.size(); ++idx)
    f[idx] = psi_eval(spec, grid.center(idx), t);
  return f;
}

double limit_residual(const BarrierSpec& spec_in, const Point& x, double t,
                      ResidualMode mode, double h) {
  const BarrierSpec spec = spec_in.resolved();
  check_life(spec, t);
  const int n = spec.n;
  const double a = spec.alpha;
  const double s2 = radial2(x, n);

  if (mode == ResidualMode::finite_difference) {
    if (spec.kind == BarrierCase::pme_separable) {
      // stencil must not straddle the support boundary
      const double K = pme_support(spec);
      const double r = std::sqrt(s2);
      const double lo = std::max(0.0, r - 2.0 * h), hi = r + 2.0 * h;
      if (lo * lo < K && hi * hi >= K)
        throw std::domain_error(
            "limit_residual: finite differences invalid at the pme support boundary");
    }
    if (t - 2.0 * h < 0.0 || t + 2.0 * h >= life_span(spec))
      throw std::domain_error("limit_residual: time stencil leaves the life span");
    auto val = [&](const Point& p, double tt) { return psi_eval(spec, p, tt); };
    auto d1 = [&](auto&& f, double step) {
      return (-f(2.0 * step) + 8.0 * f(step) - 8.0 * f(-step) + f(-2.0 * step)) /
             (12.0 * step);
    };
    auto d2 = [&](auto&& f, double step) {
      return (-f(2.0 * step) + 16.0 * f(step) - 30.0 * f(0.0) + 16.0 * f(-step) -
              f(-2.0 * step)) /
             (12.0 * step * step);
    };
    const double psi = val(x, t);
    const double psi_t = d1([&](double dt) { return val(x, t + dt); }, h);
    double lap = 0.0, grad2 = 0.0;
    for (int ax = 0; ax < n; ++ax) {
      auto f = [&](double dx) {
        Point p = x;
        p[ax] += dx;
        return val(p, t);
      };
      const double g = d1(f, h);
      lap += d2(f, h);
      grad2 += g * g;
    }
    return psi_t - std::pow(n, a - 1.0) *
                       (std::pow(psi, -a) * lap - a * std::pow(psi, -a - 1.0) * grad2);
  }

  switch (spec.kind) {
    case BarrierCase::fde_supercritical:
    case BarrierCase::super_pme: {
      const double S = s2 + spec.R * spec.R;
      const double psi = psi_eval(spec, x, t);
      const double pref =
          2.0 * std::pow(psi, 1.0 - a) / (a * std::pow(n, 1.0 - a) * S * S);
      const double bracket = (2.0 / a) * spec.R * spec.R -
                             (spec.c - 1.0) * (n - 2.0 / a) * S;
      return pref * bracket;
    }
    case BarrierCase::fde_critical: {
      const double W = spec.R * spec.R * std::exp(4.0 * n * t / spec.T);
      const double S = s2 + W;
      const double psi = psi_eval(spec, x, t);
      return -(2.0 * n * ((spec.T - t) / spec.T) * W / S + 1.0 / (t / spec.T + 1.0)) *
             psi / (a * spec.T);
    }
    case BarrierCase::fde_subcritical: {
      const double W =
          spec.R * spec.R * std::pow(t + spec.T, 4.0 / (2.0 - n * a));
      const double S = s2 + W;
      const double psi = psi_eval(spec, x, t);
      return -((2.0 / (2.0 - n * a)) * (W / S) * (spec.T - t) / (spec.T + t) + 1.0) *
             psi / (spec.T * a);
    }
    case BarrierCase::heat_gaussian: {
      const double tau = t + spec.T;
      const double psi = psi_eval(spec, x, t);
      return -((spec.c_hat * (spec.c_hat - 1.0) / 2.0) * s2 / (tau * tau) +
               (spec.c_bar - spec.c_hat) / tau) *
             n * psi / 2.0;
    }
    case BarrierCase::super_heat: {
      const double tau = spec.T - t;
      const double psi = psi_eval(spec, x, t);
      return ((spec.c_hat * (1.0 - spec.c_hat) / 2.0) * s2 / (tau * tau) +
              (spec.c_bar - spec.c_hat) / tau) *
             n * psi / 2.0;
    }
    case BarrierCase::super_fde: {
      // psi_t - n^(a-1) (psi^-a lap - a psi^(-a-1) |grad|^2) from exact derivatives
      const PsiDerivs d = psi_derivs(spec, x, t);
      double lap = 0.0, grad2 = 0.0;
      for (int ax = 0; ax < n; ++ax) {
        lap += d.diag2[ax];
        grad2 += d.grad[ax] * d.grad[ax];
      }
      return d.psi_t - std::pow(n, a - 1.0) *
                           (std::pow(d.psi, -a) * lap -
                            a * std::pow(d.psi, -a - 1.0) * grad2);
    }
    case BarrierCase::pme_separable: {
      const double K = pme_support(spec);
      const double G = K - s2;
      if (G <= 0.0) return 0.0;
      const double psi = psi_eval(spec, x, t);
      return (1.0 / a) * (2.0 / (2.0 - n * a)) * (K / G) * psi / (t + spec.T);
    }
  }
  return 0.0;
}

void expansion_at(const BarrierSpec& spec, const ModelParams& params,
                  const Point& x, double t, double* A, double* B) {
  const int n = params.n;
  const double a = params.alpha;
  const PsiDerivs d = psi_derivs(spec, x, t);
  if (d.psi <= 0.0) {
    for (int i = 0; i < 2 * n; ++i) A[i] = B[i] = 0.0;
    return;
  }
  const double w = std::pow(n / d.psi, a);
  for (int ax = 0; ax < n; ++ax) {
    A[ax] = -w * d.grad[ax];
    A[ax + n] = -A[ax];
    const double b = w * w *
                     (d.diag2[ax] - 1.5 * a * d.grad[ax] * d.grad[ax] / d.psi);
    B[ax] = b;
    B[ax + n] = b;
  }
}

ExpansionCoeffs expansion_coeffs(const BarrierSpec& spec,
                                 const ModelParams& params, const Grid& grid,
                                 double t) {
  const int n2 = params.velocity_count();
  ExpansionCoeffs e;
  e.A.assign(n2, Field(grid.size()));
  e.B.assign(n2, Field(grid.size()));
  std::vector<double> A(n2), B(n2);
  for (Index idx = 0; idx < grid.size(); ++idx) {
    expansion_at(spec, params, grid.center(idx), t, A.data(), B.data());
    for (int i = 0; i < n2; ++i) {
      e.A[i][idx] = A[i];
      e.B[i][idx] = B[i];
    }
  }
  return e;
}

namespace {

// 2nd-order centered first/second differences on one axis; periodic wrap or
// one-sided at frozen edges.
void axis_derivatives(const Field& f, const Grid& g, int axis, Field& d1,
                      Field& d2) {
  const auto st = g.strides();
  const Index ext = g.cells[axis];
  const Index stride = st[axis];
  const bool periodic = g.boundary == Boundary::periodic;
  const double inv2 = 1.0 / (2.0 * g.dx);
  const double invs = 1.0 / (g.dx * g.dx);
  for (Index i = 0; i < g.cells[0]; ++i)
    for (Index j = 0; j < g.cells[1]; ++j)
      for (Index k = 0; k < g.cells[2]; ++k) {
        const std::array<Index, 3> m{i, j, k};
        const Index idx = g.flat(i, j, k);
        const Index p = m[axis];
        double fm, fp;
        if (p == 0) {
          fp = f[idx + stride];
          fm = periodic ? f[idx + (ext - 1) * stride]
                        : 2.0 * f[idx] - fp;  // linear extrapolation
        } else if (p == ext - 1) {
          fm = f[idx - stride];
          fp = periodic ? f[idx - (ext - 1) * stride] : 2.0 * f[idx] - fm;
        } else {
          fm = f[idx - stride];
          fp = f[idx + stride];
        }
        d1[idx] = (fp - fm) * inv2;
        d2[idx] = (fp - 2.0 * f[idx] + fm) * invs;
      }
}

}  // namespace

ExpansionCoeffs expansion_coeffs(const Field& rho, const ModelParams& params,
                                 const Grid& grid) {
  if ((rho <= kDensityFloor).any())
    throw std::domain_error("expansion_coeffs: density touches the floor");
  const int n = params.n;
  ExpansionCoeffs e;
  e.A.assign(2 * n, Field(grid.size()));
  e.B.assign(2 * n, Field(grid.size()));
  Field d1(grid.size()), d2(grid.size());
  for (int ax = 0; ax < n; ++ax) {
    axis_derivatives(rho, grid, ax, d1, d2);
    for (Index idx = 0; idx < grid.size(); ++idx) {
      const double w = std::pow(n / rho[idx], params.alpha);
      e.A[ax][idx] = -w * d1[idx];
      e.A[ax + n][idx] = w * d1[idx];
      const double b =
          w * w * (d2[idx] - 1.5 * params.alpha * d1[idx] * d1[idx] / rho[idx]);
      e.B[ax][idx] = b;
      e.B[ax + n][idx] = b;
    }
  }
  return e;
}

double ansatz_value(const BarrierSpec& spec, const ModelParams& params,
                    int comp, const Point& x, double t) {
  const int n2 = params.velocity_count();
  std::vector<double> A(n2), B(n2);
  expansion_at(spec, params, x, t, A.data(), B.data());
  const double psi = psi_eval(spec, x, t);
  return (psi + params.epsilon * A[comp] +
          params.epsilon * params.epsilon * B[comp]) /
         n2;
}

std::vector<Field> ansatz_profile(const BarrierSpec& spec,
                                  const ModelParams& params, const Grid& grid,
                                  double t) {
  const int n2 = params.velocity_count();
  const ExpansionCoeffs e = expansion_coeffs(spec, params, grid, t);
  const Field psi = psi_field(spec, grid, t);
  std::vector<Field> u(n2);
  for (int i = 0; i < n2; ++i)
    u[i] = (psi + params.epsilon * e.A[i] +
            params.epsilon * params.epsilon * e.B[i]) /
           n2;
  return u;
}

double validity_radius(const BarrierSpec& spec_in, const ModelParams& params,
                       double t, double coeff) {
  const BarrierSpec spec = spec_in.resolved();
  if (t < 0.0 || t >= life_span(spec)) return 0.0;
  const double over_eps = coeff / params.epsilon;
  switch (spec.kind) {
    case BarrierCase::fde_supercritical:
    case BarrierCase::super_pme: {
      const double b = over_eps * (spec.T - spec.c * t);
      const double r2 = b * b - spec.R * spec.R;
      return r2 > 0.0 ? std::sqrt(r2) : 0.0;
    }
    case BarrierCase::fde_critical: {
      const double b = over_eps * spec.T;
      const double W = spec.R * spec.R * std::exp(4.0 * spec.n * t / spec.T);
      const double r2 = b * b - W;
      return r2 > 0.0 ? std::sqrt(r2) : 0.0;
    }
    case BarrierCase::fde_subcritical: {
      // the bound is on |x|^2 + W itself for this case
      const double b = over_eps * spec.T;
      const double W =
          spec.R * spec.R * std::pow(t + spec.T, 4.0 / (2.0 - spec.n * spec.alpha));
      const double r2 = b - W;
      return r2 > 0.0 ? std::sqrt(r2) : 0.0;
    }
    case BarrierCase::heat_gaussian:
      return over_eps * (t + spec.T);
    case BarrierCase::pme_separable: {
      const double b = over_eps * (t + spec.T);
      const double r2 = b * b - pme_support(spec);
      return r2 > 0.0 ? std::sqrt(r2) : 0.0;
    }
    case BarrierCase::super_heat:
    case BarrierCase::super_fde:
      return over_eps * (spec.T - t);
  }
  return 0.0;
}

double kinetic_residual_at(const BarrierSpec& spec, const ModelParams& params,
                           const RateSpec& rate, int comp, const Point& x,
                           double t, double h) {
  const int n2 = params.velocity_count();
  auto u = [&](int i, const Point& p, double tt) {
    return ansatz_value(spec, params, i, p, tt);
  };
  auto d1 = [&](auto&& f, double step) {
    return (-f(2.0 * step) + 8.0 * f(step) - 8.0 * f(-step) + f(-2.0 * step)) /
           (12.0 * step);
  };
  const double du_dt = d1([&](double dt) { return u(comp, x, t + dt); }, h);
  const int ax = params.axis(comp);
  const double dir = params.direction(comp);
  const double du_dx = d1(
      [&](double dx) {
        Point p = x;
        p[ax] += dx;
        return u(comp, p, t);
      },
      h);

  Eigen::VectorXd w(n2);
  for (int i = 0; i < n2; ++i) w[i] = u(i, x, t);
  double coll_i;
  if (w.isZero(0.0)) {
    coll_i = 0.0;
  } else {
    if ((w.array() <= 0.0).any())
      throw std::domain_error("kinetic_residual: nonpositive profile");
    coll_i = collision_map(rate, w)[comp];
  }
  return du_dt + dir / params.epsilon * du_dx -
         coll_i / (2.0 * params.n * params.epsilon * params.epsilon);
}

std::vector<Field> kinetic_residual(const KineticState& prev,
                                    const KineticState& mid,
                                    const KineticState& next,
                                    const ModelParams& params,
                                    const RateSpec& rate) {
  const int n2 = params.velocity_count();
  const Grid& g = mid.grid;
  for (const Field& f : mid.u)
    if ((f <= 0.0).any())
      throw std::domain_error("kinetic_residual: nonpositive profile");
  std::vector<Field> res(n2, Field(g.size()));
  const double dt2 = next.t - prev.t;
  Field d1(g.size()), d2(g.size());
  for (int i = 0; i < n2; ++i) {
    axis_derivatives(mid.u[i], g, params.axis(i), d1, d2);
    res[i] = (next.u[i] - prev.u[i]) / dt2 +
             (params.direction(i) / params.epsilon) * d1;
  }
  Eigen::VectorXd w(n2);
  const double pref = 1.0 / (2.0 * params.n * params.epsilon * params.epsilon);
  for (Index idx = 0; idx < g.size(); ++idx) {
    for (int i = 0; i < n2; ++i) w[i] = mid.u[i][idx];
    const Eigen::VectorXd A = collision_map(rate, w);
    for (int i = 0; i < n2; ++i) res[i][idx] -= pref * A[i];
  }
  return res;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Point sample_ball(std::mt19937_64& rng, int n, double radius) {
  // uniform direction via normal trick, uniform radius via r^(1/n)
  Point p = Point::Zero();
  double norm2 = 0.0;
  for (int a = 0; a < n; ++a) {
    const double u1 = std::max(uniform01(rng), 1e-300);
    const double u2 = uniform01(rng);
    p[a] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    norm2 += p[a] * p[a];
  }
  const double r = radius * std::pow(uniform01(rng), 1.0 / n);
  if (norm2 == 0.0) return Point::Zero();
  return p * (r / std::sqrt(norm2));
}

}  // namespace

SignCertificate certify_barrier(const BarrierSpec& spec_in,
                                const ModelParams& params,
                                const RateSpec& rate,
                                const CertifyOptions& opts) {
  const BarrierSpec spec = spec_in.resolved();
  const bool super = is_supersolution(spec.kind);
  SignCertificate cert;
  cert.spec = spec;
  cert.epsilon = params.epsilon;
  cert.samples = opts.samples;

  const double life = life_span(spec);
  const double t_hi =
      (std::isfinite(life) ? opts.time_fraction * life : spec.T) - 2.0 * opts.fd_step;
  const double t_lo = 2.0 * opts.fd_step;
  if (t_hi <= t_lo)
    throw std::invalid_argument("certify_barrier: life span too short for stencil");

  // limit-residual sign over the life span, independent of the region coefficient
  {
    std::mt19937_64 rng(opts.seed);
    double worst = -std::numeric_limits<double>::infinity();
    const double rad = 3.0 * std::max(1.0, spec.R);
    for (long s = 0; s < opts.samples; ++s) {
      const double t = t_lo + (t_hi - t_lo) * uniform01(rng);
      Point x = sample_ball(rng, spec.n, rad);
      if (spec.kind == BarrierCase::pme_separable) {
        const double K = pme_support(spec);
        x = sample_ball(rng, spec.n, 0.999 * std::sqrt(K));
      }
      const double r = limit_residual(spec, x, t, ResidualMode::closed_form);
      const double viol = super ? -r : r;
      worst = std::max(worst, viol);
    }
    cert.max_limit_residual = worst;
    cert.limit_sign_ok = worst <= opts.limit_slack;
  }

  // kinetic residual + sandwich on the calibrated region; a cheap scout pass
  // locates the coefficient, the full sample count confirms it
  const int n2 = params.velocity_count();
  struct Pass {
    double kin = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    double high = -std::numeric_limits<double>::infinity();
    long inside = 0;
    bool ok(const CertifyOptions& o) const {
      return inside > 0 && kin <= o.kinetic_slack && low >= 0.0 && high <= 0.0;
    }
  };
  std::vector<double> A(n2), B(n2);
  auto sample_pass = [&](double coeff, long count) {
    Pass pass;
    std::mt19937_64 rng(opts.seed + 1);
    // count in-region samples; the attempt cap guards empty regions
    for (long s = 0; pass.inside < count && s < 20 * count; ++s) {
      const double t = t_lo + (t_hi - t_lo) * uniform01(rng);
      // the whole time stencil must sit inside the region
      double rmax = validity_radius(spec, params, t, coeff);
      rmax = std::min(rmax, validity_radius(spec, params, t - 2.0 * opts.fd_step, coeff));
      rmax = std::min(rmax, validity_radius(spec, params, t + 2.0 * opts.fd_step, coeff));
      if (spec.kind == BarrierCase::pme_separable) {
        const double K = pme_support(spec);
        const double safe = std::sqrt(0.9 * K) - 3.0 * opts.fd_step;
        rmax = std::min(rmax, std::max(0.0, safe));
      }
      if (rmax <= 3.0 * opts.fd_step) continue;
      const Point x = sample_ball(rng, spec.n, rmax - 2.0 * opts.fd_step);
      ++pass.inside;
      const double psi = psi_eval(spec, x, t);
      expansion_at(spec, params, x, t, A.data(), B.data());
      bool positive = true;
      for (int i = 0; i < n2; ++i) {
        const double ui =
            (psi + params.epsilon * A[i] + params.epsilon * params.epsilon * B[i]) /
            n2;
        pass.low = std::min(pass.low, ui - psi / (2.0 * n2));
        pass.high = std::max(pass.high, ui - 3.0 * psi / (2.0 * n2));
        if (ui <= 0.0) positive = false;
      }
      if (!positive) continue;  // sandwich already failed; the region shrinks
      for (int i = 0; i < n2; ++i) {
        double r;
        try {
          r = kinetic_residual_at(spec, params, rate, i, x, t, opts.fd_step);
        } catch (const std::domain_error&) {
          // a stencil point left the positive set; count as a violation
          pass.kin = std::numeric_limits<double>::infinity();
          break;
        }
        pass.kin = std::max(pass.kin, super ? -r : r);
      }
    }
    return pass;
  };

  double coeff = opts.initial_coeff;
  for (int shrink = 0; shrink <= opts.max_shrinks;
       ++shrink, coeff *= opts.shrink_factor) {
    Pass scout = sample_pass(coeff, opts.scout_samples);
    if (scout.inside == 0) continue;
    if (!scout.ok(opts)) {
      cert.coefficient = coeff;
      cert.max_kinetic_residual = scout.kin;
      cert.min_sandwich_low = scout.low;
      cert.max_sandwich_high = scout.high;
      continue;
    }
    const Pass full = sample_pass(coeff, opts.samples);
    cert.coefficient = coeff;
    cert.samples = full.inside;
    cert.max_kinetic_residual = full.kin;
    cert.min_sandwich_low = full.low;
    cert.max_sandwich_high = full.high;
    cert.kinetic_sign_ok = full.inside > 0 && full.kin <= opts.kinetic_slack;
    cert.sandwich_ok = full.inside > 0 && full.low >= 0.0 && full.high <= 0.0;
    if (cert.kinetic_sign_ok && cert.sandwich_ok) break;
  }

  std::ostringstream os;
  os << "samples in the " << to_string(spec.kind)
     << " validity region, coefficient " << cert.coefficient << ", t in ["
     << t_lo << ", " << t_hi << "], eps " << params.epsilon;
  cert.region_description = os.str();
  return cert;
}

BarrierSpec calibrate_super_fde_radius(BarrierSpec spec, long samples,
                                       uint64_t seed, double slack) {
  spec = spec.resolved();
  if (spec.kind != BarrierCase::super_fde)
    throw std::invalid_argument("calibrate_super_fde_radius: wrong case");
  for (int iter = 0; iter < 60; ++iter) {
    std::mt19937_64 rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    const double rad = 3.0 * std::max(1.0, spec.R);
    for (long s = 0; s < samples; ++s) {
      const double t = 0.9 * spec.T * uniform01(rng);
      const Point x = sample_ball(rng, spec.n, rad);
      worst = std::max(worst, -limit_residual(spec, x, t));
    }
    if (worst <= slack) return spec;
    spec.R *= 2.0;
  }
  throw std::runtime_error("calibrate_super_fde_radius: no admissible R found");
}

double taylor_remainder_bound(double a, double b, double eps, double alpha) {
  if (std::abs(a * eps + b * eps * eps) > 0.5)
    throw std::domain_error("taylor_remainder_bound: outside the smallness regime");
  const double b3 = alpha * (alpha - 1.0) * (alpha - 2.0) / 6.0;
  const double b2 = alpha * (alpha - 1.0) / 2.0;
  const double m = std::abs(a) + 2.0 * std::abs(b) * eps;
  // base (1 + a z + b z^2) ranges over [1/2, 3/2]; negative exponents peak at 1/2
  return std::abs(b3) * std::pow(0.5, alpha - 3.0) * m * m * m +
         2.0 * std::abs(b2) * std::pow(0.5, alpha - 2.0) * m * std::abs(b);
}

}  // namespace carleman
