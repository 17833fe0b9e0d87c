#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace carleman {

/// Cell-centered scalar field stored flat in row-major cell order.
using Field = Eigen::ArrayXd;

/// Spatial point; components beyond the active dimension are zero.
using Point = Eigen::Vector3d;

using Index = Eigen::Index;

/// Densities are clamped to this value before singular rate evaluations.
inline constexpr double kDensityFloor = 1e-12;

/// sgn+(a): 1 for a > 0, 0 otherwise.
inline double sgn_plus(double a) { return a > 0.0 ? 1.0 : 0.0; }

/// pow with exact short paths for the exponents that dominate the hot loops.
inline double pow_fast(double x, double a) {
  if (a == 0.0) return 1.0;
  if (a == 1.0) return x;
  if (a == -1.0) return 1.0 / x;
  if (a == 0.5) return std::sqrt(x);
  if (a == -0.5) return 1.0 / std::sqrt(x);
  if (a == 2.0) return x * x;
  if (a == -2.0) return 1.0 / (x * x);
  return std::pow(x, a);
}

}  // namespace carleman
