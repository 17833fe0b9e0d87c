#pragma once

#include <optional>
#include <vector>

#include "carleman/barriers.hpp"
#include "carleman/model.hpp"

namespace carleman {

/// One additive building block of an initial-data component.
struct Primitive {
  enum class Kind { constant, power_tail, gaussian_bump, barrier_trace };
  Kind kind = Kind::constant;
  double value = 0.0;     ///< constant level or amplitude
  double exponent = 2.0;  ///< power_tail decay exponent p
  double core = 1.0;      ///< power_tail core radius
  double width = 1.0;     ///< gaussian width
  Point center = Point::Zero();
  std::optional<BarrierSpec> barrier;  ///< barrier_trace source
  double scale = 1.0;                  ///< barrier_trace multiplier

  double eval(const Point& x, int n) const;
};

/// constant(c)
Primitive constant_primitive(double c);
/// A / (|x|^p + core^p)
Primitive power_tail(double A, double p, double core);
/// amp * exp(-|x-center|^2 / width^2)
Primitive gaussian_bump(double amp, double width, const Point& center = Point::Zero());
/// scale * Psi(x, 0)
Primitive barrier_trace(const BarrierSpec& spec, double scale = 1.0);

struct ComponentRecipe {
  std::vector<Primitive> parts;
  double eval(const Point& x, int n) const;
};

/// Constructive initial data: one recipe g_i per velocity component plus the
/// reference envelope f_i whose tails carry the horizon information. An
/// optional list of L1 bumps perturbs g away from f with a recorded budget.
struct InitialDataSpec {
  std::vector<ComponentRecipe> g;  ///< size 2n
  std::vector<ComponentRecipe> f;  ///< envelope; empty means f = g
  double l1_budget = 0.0;          ///< analytic L1 norm of the g - f bumps

  const ComponentRecipe& envelope(int i) const {
    return f.empty() ? g[i] : f[i];
  }
};

/// Same recipe for every component.
InitialDataSpec isotropic_data(int n, const ComponentRecipe& recipe);

/// Adds an L1 bump to component i of g (leaving the envelope f at the
/// unperturbed recipe) and accrues its analytic mass in the budget.
void add_l1_perturbation(InitialDataSpec& spec, int component, int n,
                         const Primitive& bump);

/// Cell-centered sampling of the recipes. Rejects power tails that decay
/// faster than |x|^(-2/alpha) when 2/n <= alpha <= 1.
std::vector<Field> build(const InitialDataSpec& spec, const Grid& grid,
                         const ModelParams& params);

struct SandwichResult {
  std::vector<Field> g_m;
  double l1_gap = 0.0;  ///< ||g_m - g||_L1 on the grid
};

/// Clips g between (3/4n) Psi_{m,T} and (1/4n) PsiBar_{m,T} at t = 0, where
/// the level m replaces the barrier radius parameter.
SandwichResult sandwich_truncate(const std::vector<Field>& g, const Grid& grid,
                                 double m, const BarrierSpec& lower,
                                 const BarrierSpec& upper,
                                 const ModelParams& params);

struct Horizons {
  double T1 = std::numeric_limits<double>::infinity();
  double T2 = std::numeric_limits<double>::infinity();
  double min() const { return std::min(T1, T2); }
};

/// The horizon estimates from the envelope tail metadata; negative powers of
/// zero map to infinity.
Horizons horizon_estimate(const InitialDataSpec& spec, const ModelParams& params);

/// Analytic tail limits of a recipe for a given alpha.
struct TailInfo {
  double liminf_power = 0.0;   ///< liminf |x|^(2/alpha) f   (alpha > 0)
  double limsup_power = 0.0;   ///< limsup |x|^(2/alpha) f   (alpha < 0)
  double limsup_log = 0.0;     ///< limsup |x|^-2 log(f + 1)
};
TailInfo tail_info(const ComponentRecipe& recipe, const ModelParams& params);

}  // namespace carleman
