#pragma once

#include <string>
#include <vector>

#include "carleman/interaction.hpp"
#include "carleman/model.hpp"

namespace carleman {

/// Closed-form sub/supersolution families of the limit equation.
/// The five subsolution cases cover the alpha ranges (2/n,1], {2/n}, (0,2/n),
/// {0} and [-1,0); the super_* families are the matching supersolutions.
enum class BarrierCase {
  fde_supercritical,   ///< n>=3, alpha in (2/n,1]; C_a ((T-ct)/(|x|^2+R^2))^(1/a)
  fde_critical,        ///< alpha = 2/n
  fde_subcritical,     ///< alpha in (0,2/n)
  heat_gaussian,       ///< alpha = 0, decaying Gaussian
  pme_separable,       ///< alpha in [-1,0), compact support, grows in t
  super_pme,           ///< alpha in [-1,0), grows in x, blows up at t = T/c
  super_heat,          ///< alpha = 0, growing Gaussian
  super_fde            ///< alpha in (0,1], heat form, needs large R
};

std::string to_string(BarrierCase c);
BarrierCase barrier_case_from_string(const std::string& s);
bool is_supersolution(BarrierCase c);

struct BarrierSpec {
  BarrierCase kind = BarrierCase::heat_gaussian;
  int n = 2;
  double alpha = 0.0;
  double R = 1.0;
  double T = 1.0;
  double c = 0.0;      ///< speed constant; 0 requests the default
  double c_hat = 0.0;  ///< Gaussian exponent constants (heat forms); 0 = default
  double c_bar = 0.0;

  /// Spec with defaulted constants filled in, compatibility checked.
  BarrierSpec resolved() const;
};

struct BarrierConstants {
  double C_alpha = 0.0;  ///< amplitude constant (power-form cases)
  double c = 0.0;        ///< default speed constant where one exists
  double c_hat = 0.0;
  double c_bar = 0.0;
};

/// Closed-form constants for a (case, n, alpha) combination; throws when the
/// combination is incompatible.
BarrierConstants barrier_constants(BarrierCase kind, int n, double alpha);

/// End of the time interval the family is defined on (T/c, T or infinity).
double life_span(const BarrierSpec& spec);

/// Pointwise barrier value. Throws outside the life span; case pme_separable
/// is 0 outside its support.
double psi_eval(const BarrierSpec& spec, const Point& x, double t);

Field psi_field(const BarrierSpec& spec, const Grid& grid, double t);

/// Exact first/second space derivatives and time derivative of psi.
struct PsiDerivs {
  double psi = 0.0;
  double psi_t = 0.0;
  Point grad = Point::Zero();
  Point diag2 = Point::Zero();  ///< d^2 psi / dx_a^2
};
PsiDerivs psi_derivs(const BarrierSpec& spec, const Point& x, double t);

enum class ResidualMode { closed_form, finite_difference };

/// psi_t - div(grad psi / (n^(1-alpha) psi^alpha)). closed_form evaluates the
/// per-case displayed formula; finite_difference uses 4th-order centered
/// stencils on psi_eval (invalid across the pme support boundary).
double limit_residual(const BarrierSpec& spec, const Point& x, double t,
                      ResidualMode mode = ResidualMode::closed_form,
                      double h = 1e-3);

/// Expansion coefficients A_i = -(n/rho)^a D_{v_i} rho and
/// B_i = (n/rho)^(2a) (d_ii rho - (3a/2)(d_i rho)^2 / rho), B_{i+n} = B_i.
struct ExpansionCoeffs {
  std::vector<Field> A;  ///< 2n fields
  std::vector<Field> B;
};

/// Closed-form coefficients of a barrier profile at one point.
void expansion_at(const BarrierSpec& spec, const ModelParams& params,
                  const Point& x, double t, double* A, double* B);

/// Closed-form coefficients sampled on a grid.
ExpansionCoeffs expansion_coeffs(const BarrierSpec& spec,
                                 const ModelParams& params, const Grid& grid,
                                 double t);

/// Field-mode coefficients from an arbitrary positive density by 2nd-order
/// centered differences.
ExpansionCoeffs expansion_coeffs(const Field& rho, const ModelParams& params,
                                 const Grid& grid);

/// Second-order ansatz u_i = (psi + eps A_i + eps^2 B_i) / 2n at one point.
double ansatz_value(const BarrierSpec& spec, const ModelParams& params,
                    int comp, const Point& x, double t);

std::vector<Field> ansatz_profile(const BarrierSpec& spec,
                                  const ModelParams& params, const Grid& grid,
                                  double t);

/// Largest |x| inside the case's validity region at time t for a given
/// region coefficient (the paper's existence constant, calibrated here).
/// Returns 0 when the region is empty.
double validity_radius(const BarrierSpec& spec, const ModelParams& params,
                       double t, double coeff);

/// Kinetic residual of the closed-form ansatz at a point, 4th-order centered
/// differences in x and t, exact collision evaluation.
double kinetic_residual_at(const BarrierSpec& spec, const ModelParams& params,
                           const RateSpec& rate, int comp, const Point& x,
                           double t, double h = 1e-2);

/// Grid-mode kinetic residual from three consecutive states (2nd order).
std::vector<Field> kinetic_residual(const KineticState& prev,
                                    const KineticState& mid,
                                    const KineticState& next,
                                    const ModelParams& params,
                                    const RateSpec& rate);

/// Sign certificate for a barrier: limit-residual sign on the life span and
/// kinetic-residual sign of the ansatz on a calibrated validity region.
struct SignCertificate {
  BarrierSpec spec;
  double epsilon = 0.0;
  double coefficient = 0.0;     ///< certified validity-region coefficient
  double max_limit_residual = 0.0;   ///< signed; subsolutions want <= slack
  double max_kinetic_residual = 0.0;
  double min_sandwich_low = 0.0;     ///< min of u_i - psi/4n over samples
  double max_sandwich_high = 0.0;    ///< max of u_i - 3 psi/4n over samples
  long samples = 0;
  bool limit_sign_ok = false;
  bool kinetic_sign_ok = false;
  bool sandwich_ok = false;
  std::string region_description;
};

struct CertifyOptions {
  long samples = 10000;
  long scout_samples = 1000;  ///< cheap pass that locates the coefficient
  uint64_t seed = 20240901;
  double limit_slack = 1e-9;
  double kinetic_slack = 1e-8;
  double fd_step = 5e-3;
  double initial_coeff = 1.0;
  double shrink_factor = 0.8;
  int max_shrinks = 30;
  double time_fraction = 0.9;  ///< sample t in [0, fraction * life span]
};

/// Shrinks the region coefficient geometrically until the ansatz kinetic
/// residual has the certified sign and the sandwich holds on sampled points.
SignCertificate certify_barrier(const BarrierSpec& spec,
                                const ModelParams& params,
                                const RateSpec& rate,
                                const CertifyOptions& opts = {});

/// Calibrates the supersolution radius R (alpha in (0,1] heat form): grows R
/// geometrically until the limit-residual sign certificate passes.
BarrierSpec calibrate_super_fde_radius(BarrierSpec spec, long samples,
                                       uint64_t seed, double slack = 1e-9);

/// Upper bound on the Taylor remainder |R_{a,b}(eps)| of (1+a x+b x^2)^alpha
/// under the smallness condition |a eps + b eps^2| <= 1/2.
double taylor_remainder_bound(double a, double b, double eps, double alpha);

}  // namespace carleman
