#pragma once

#include <functional>
#include <vector>

#include "carleman/grid.hpp"
#include "carleman/types.hpp"

namespace carleman {

/// Kinetic model parameters. The 2n velocities are +e_i for components
/// 0..n-1 and -e_i for components n..2n-1.
struct ModelParams {
  int n = 1;           ///< spatial dimension, 1..3
  double alpha = 0.0;  ///< rate exponent, |alpha| <= 1
  double epsilon = 1.0;

  int velocity_count() const { return 2 * n; }

  /// Axis and sign of velocity component i.
  int axis(int i) const { return i < n ? i : i - n; }
  double direction(int i) const { return i < n ? 1.0 : -1.0; }

  void validate() const;
};

/// The 2n particle density fields at one time.
struct KineticState {
  Grid grid;
  double t = 0.0;
  std::vector<Field> u;  ///< size 2n, each of grid.size()

  int components() const { return static_cast<int>(u.size()); }
};

KineticState make_state(const Grid& grid, int n, double t = 0.0);

/// Moment variables rho, rho_i, J_i and the pair currents J_{i,j}.
struct MacroState {
  double t = 0.0;
  Field rho;                         ///< sum of all u_i
  std::vector<Field> rho_pair;       ///< n fields, u_i + u_{i+n}
  std::vector<Field> current;        ///< n fields, (u_i - u_{i+n}) / eps
  std::vector<std::vector<Field>> current_pair;  ///< 2n x 2n, (u_i - u_j)/eps
};

MacroState moments(const KineticState& state, const ModelParams& params);

/// Total density field without the pair machinery.
Field total_density(const KineticState& state);

/// Recovers u_i = (rho_i + eps J_i)/2 and u_{i+n} = (rho_i - eps J_i)/2.
KineticState reconstruct(const MacroState& macro, const Grid& grid,
                         const ModelParams& params);

enum class Norm { L1, L2, Linf };

/// Midpoint Riemann-sum norm of a field over the cells inside a region.
double norm_on(const Field& f, const Grid& grid, const Region& region, Norm which);

/// Family norm: L1 sums the component norms, L2 stacks the components,
/// Linf takes the max.
double norm_on(const std::vector<Field>& fs, const Grid& grid,
               const Region& region, Norm which);

/// Region covering the whole grid (all cells, all times).
Region whole_domain(const Grid& grid);

/// Centered box covering half the domain extent per axis.
Region centered_box(const Grid& grid, double fraction = 0.5);

/// Compactly supported C^1 cutoff, 0 <= phi <= 1, phi = 0 outside the
/// declared support radius.
struct TestCutoff {
  enum class Kind { smooth_bump, tensor_cosine };
  Kind kind = Kind::smooth_bump;
  Point center = Point::Zero();
  double radius = 1.0;

  double operator()(const Point& x, int n) const;
};

/// Samples a cutoff on the grid.
Field sample_cutoff(const TestCutoff& phi, const Grid& grid);

}  // namespace carleman
