#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "carleman/types.hpp"

namespace carleman {

/// Interaction rate families. power_sum is k_alpha(a,b) = (a+b)^alpha;
/// mean_field relaxes every component against the total density with rate
/// rho^alpha; power_difference uses u_j^(alpha+1) - u_i^(alpha+1).
enum class RateKind { power_sum, mean_field, power_difference };

struct RateSpec {
  RateKind kind = RateKind::power_sum;
  double alpha = 0.0;
};

std::string to_string(RateKind kind);
RateKind rate_kind_from_string(const std::string& s);

/// Pairwise rate k(a,b,x). For mean_field the binary form is (n(a+b))^alpha
/// so that the equilibrium pair (rho/2n, rho/2n) reproduces the rho^alpha
/// rate; for power_difference it is the divided difference of
/// t -> t^(alpha+1). The position is reserved for x-dependent rates; the
/// built-in kinds ignore it. Throws on the singular corner a+b = 0 with
/// alpha < 0.
double rate(const RateSpec& spec, double a, double b, int n = 1,
            const Point& x = Point::Zero());

/// k evaluated at the isotropic pair (rho/2n, rho/2n).
double equilibrium_rate(const RateSpec& spec, double rho, int n);

/// Bound M(lambda) with 1/M <= k <= M on [1/lambda, lambda]^2.
double rate_bound(const RateSpec& spec, double lambda, int n = 1);

/// The collision map A(x)(u) of the interaction term, without the
/// 1/(2n eps^2) prefactor. u has 2n components; the position is reserved for
/// x-dependent rates.
Eigen::VectorXd collision_map(const RateSpec& spec, const Eigen::VectorXd& u,
                              const Point& x = Point::Zero());

/// Jacobian dA/du of the collision map.
Eigen::MatrixXd collision_jacobian(const RateSpec& spec, const Eigen::VectorXd& u);

struct DissipativityReport {
  double max_violation = 0.0;  ///< max of (A(u)-A(v)) . sgn+(u-v)
  Eigen::VectorXd worst_u, worst_v;
  bool certified(double tol = 1e-12) const { return max_violation <= tol; }
};

/// Randomized search for T-dissipativity violations over pairs sampled
/// uniformly from [lo, hi]^{2n}.
DissipativityReport t_dissipativity_test(const RateSpec& spec, int n,
                                         long samples, double lo, double hi,
                                         uint64_t seed);

}  // namespace carleman
