#include "carleman/interaction.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace carleman {

std::string to_string(RateKind kind) {
  switch (kind) {
    case RateKind::power_sum: return "power_sum";
    case RateKind::mean_field: return "mean_field";
    case RateKind::power_difference: return "power_difference";
  }
  return "?";
}

RateKind rate_kind_from_string(const std::string& s) {
  if (s == "power_sum") return RateKind::power_sum;
  if (s == "mean_field") return RateKind::mean_field;
  if (s == "power_difference") return RateKind::power_difference;
  throw std::invalid_argument("unknown rate kind: " + s);
}

namespace {

[[noreturn]] void singular_rate() {
  throw std::domain_error(
      "singular rate: a+b = 0 with alpha < 0 (floor densities first)");
}

}  // namespace

double rate(const RateSpec& spec, double a, double b, int n, const Point&) {
  if (a < 0.0 || b < 0.0)
    throw std::domain_error("rate: densities must be nonnegative");
  switch (spec.kind) {
    case RateKind::power_sum: {
      const double s = a + b;
      if (s == 0.0 && spec.alpha < 0.0) singular_rate();
      return pow_fast(s, spec.alpha);
    }
    case RateKind::mean_field: {
      const double s = n * (a + b);
      if (s == 0.0 && spec.alpha < 0.0) singular_rate();
      return pow_fast(s, spec.alpha);
    }
    case RateKind::power_difference: {
      // divided difference of t -> t^(alpha+1); (alpha+1) a^alpha on the diagonal
      const double p = spec.alpha + 1.0;
      if ((a == 0.0 || b == 0.0) && spec.alpha < 0.0) singular_rate();
      if (a == b) return p * pow_fast(a, spec.alpha);
      return (pow_fast(a, p) - pow_fast(b, p)) / (a - b);
    }
  }
  return 0.0;
}

double equilibrium_rate(const RateSpec& spec, double rho, int n) {
  return rate(spec, rho / (2.0 * n), rho / (2.0 * n), n);
}

double rate_bound(const RateSpec& spec, double lambda, int n) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rate_bound: lambda must be > 0");
  if (lambda < 1.0) lambda = 1.0 / lambda;
  const double lo = 1.0 / lambda, hi = lambda;
  double kmin = 1.0, kmax = 1.0;
  switch (spec.kind) {
    case RateKind::power_sum:
    case RateKind::mean_field: {
      const double f = spec.kind == RateKind::mean_field ? n : 1.0;
      const double a = pow_fast(2.0 * f * lo, spec.alpha);
      const double b = pow_fast(2.0 * f * hi, spec.alpha);
      kmin = std::min(a, b);
      kmax = std::max(a, b);
      break;
    }
    case RateKind::power_difference: {
      // monotone in each argument, so extremes sit at the corners
      const double a = rate(spec, lo, lo);
      const double b = rate(spec, hi, hi);
      kmin = std::min(a, b);
      kmax = std::max(a, b);
      break;
    }
  }
  return std::max(kmax, 1.0 / kmin);
}

Eigen::VectorXd collision_map(const RateSpec& spec, const Eigen::VectorXd& u,
                              const Point&) {
  const int n2 = static_cast<int>(u.size());
  if (n2 < 2 || n2 % 2 != 0)
    throw std::invalid_argument("collision_map: need 2n components");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n2);
  switch (spec.kind) {
    case RateKind::power_sum:
      for (int i = 0; i < n2; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n2; ++j) {
          if (j == i) continue;
          const double s = u[i] + u[j];
          if (s == 0.0 && spec.alpha < 0.0) singular_rate();
          acc += pow_fast(s, spec.alpha) * (u[j] - u[i]);
        }
        out[i] = acc;
      }
      break;
    case RateKind::mean_field: {
      const double rho = u.sum();
      if (rho == 0.0 && spec.alpha < 0.0) singular_rate();
      const double k = pow_fast(rho, spec.alpha);
      for (int i = 0; i < n2; ++i) out[i] = k * (rho - n2 * u[i]);
      break;
    }
    case RateKind::power_difference: {
      const double p = spec.alpha + 1.0;
      double sum = 0.0;
      for (int j = 0; j < n2; ++j) {
        if (u[j] == 0.0 && p <= 0.0) singular_rate();
        sum += pow_fast(u[j], p);
      }
      for (int i = 0; i < n2; ++i) out[i] = sum - n2 * pow_fast(u[i], p);
      break;
    }
  }
  return out;
}

Eigen::MatrixXd collision_jacobian(const RateSpec& spec, const Eigen::VectorXd& u) {
  const int n2 = static_cast<int>(u.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n2, n2);
  const double a = spec.alpha;
  switch (spec.kind) {
    case RateKind::power_sum:
      for (int i = 0; i < n2; ++i) {
        double dii = 0.0;
        for (int j = 0; j < n2; ++j) {
          if (j == i) continue;
          const double s = u[i] + u[j];
          const double k = pow_fast(s, a);
          const double dk = a == 0.0 ? 0.0 : a * pow_fast(s, a - 1.0);
          const double diff = u[j] - u[i];
          dii += dk * diff - k;
          J(i, j) = dk * diff + k;
        }
        J(i, i) = dii;
      }
      break;
    case RateKind::mean_field: {
      const double rho = u.sum();
      const double k = pow_fast(rho, a);
      const double dk = a == 0.0 ? 0.0 : a * pow_fast(rho, a - 1.0);
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j)
          J(i, j) = dk * (rho - n2 * u[i]) + k * (1.0 - (i == j ? n2 : 0.0));
      break;
    }
    case RateKind::power_difference: {
      const double p = a + 1.0;
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) {
          const double dj = p == 0.0 ? 0.0 : p * pow_fast(u[j], a);
          J(i, j) = dj - (i == j ? n2 * (p == 0.0 ? 0.0 : p * pow_fast(u[i], a)) : 0.0);
        }
      break;
    }
  }
  return J;
}

namespace {

// Antisymmetric pair flux into component i from j; A_i = sum_j pair_flux(i,j).
double pair_flux(const RateSpec& spec, const Eigen::VectorXd& u, double rho_pow,
                 int i, int j) {
  switch (spec.kind) {
    case RateKind::power_sum:
      return pow_fast(u[i] + u[j], spec.alpha) * (u[j] - u[i]);
    case RateKind::mean_field:
      return rho_pow * (u[j] - u[i]);
    case RateKind::power_difference:
      return pow_fast(u[j], spec.alpha + 1.0) - pow_fast(u[i], spec.alpha + 1.0);
  }
  return 0.0;
}

}  // namespace

DissipativityReport t_dissipativity_test(const RateSpec& spec, int n,
                                         long samples, double lo, double hi,
                                         uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("t_dissipativity_test: samples >= 1");
  if (!(lo > 0.0 && hi > lo))
    throw std::invalid_argument("t_dissipativity_test: box must lie in (0, inf)");
  const int n2 = 2 * n;
  std::mt19937_64 rng(seed);
  auto draw = [&]() {
    // 53-bit uniform, independent of distribution-library internals
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  DissipativityReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd u(n2), v(n2);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < n2; ++i) u[i] = draw();
    for (int i = 0; i < n2; ++i) v[i] = draw();
    // grouped per unordered pair: the contribution is
    // (flux_u(i,j) - flux_v(i,j)) (sgn+(u_i - v_i) - sgn+(u_j - v_j)),
    // which vanishes exactly when the signs agree
    const double ru = spec.kind == RateKind::mean_field
                          ? pow_fast(u.sum(), spec.alpha)
                          : 0.0;
    const double rv = spec.kind == RateKind::mean_field
                          ? pow_fast(v.sum(), spec.alpha)
                          : 0.0;
    double dot = 0.0;
    for (int i = 0; i < n2; ++i)
      for (int j = i + 1; j < n2; ++j) {
        const double si = sgn_plus(u[i] - v[i]);
        const double sj = sgn_plus(u[j] - v[j]);
        if (si == sj) continue;
        const double term =
            pair_flux(spec, u, ru, i, j) - pair_flux(spec, v, rv, i, j);
        dot += term * (si - sj);
      }
    if (dot > rep.max_violation) {
      rep.max_violation = dot;
      rep.worst_u = u;
      rep.worst_v = v;
    }
  }
  return rep;
}

}  // namespace carleman
