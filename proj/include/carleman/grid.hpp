#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "carleman/types.hpp"

namespace carleman {

enum class Boundary { periodic, frozen_far_field };

/// Uniform Cartesian grid with identical spacing on every axis.
/// Spacing must be identical so that transport over dt = eps*dx is an exact
/// one-cell shift.
struct Grid {
  int n = 1;
  std::array<Index, 3> cells{1, 1, 1};
  double dx = 1.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  Boundary boundary = Boundary::periodic;

  Index size() const { return cells[0] * cells[1] * cells[2]; }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < n; ++a) v *= dx;
    return v;
  }

  double extent(int axis) const { return cells[axis] * dx; }

  /// Row-major strides; axis 0 is slowest.
  std::array<Index, 3> strides() const {
    return {cells[1] * cells[2], cells[2], Index{1}};
  }

  Index flat(Index i, Index j = 0, Index k = 0) const {
    return (i * cells[1] + j) * cells[2] + k;
  }

  std::array<Index, 3> unflatten(Index idx) const {
    const Index k = idx % cells[2];
    const Index j = (idx / cells[2]) % cells[1];
    const Index i = idx / (cells[1] * cells[2]);
    return {i, j, k};
  }

  /// Center of cell (i,j,k).
  Point center(const std::array<Index, 3>& m) const {
    Point x = Point::Zero();
    for (int a = 0; a < n; ++a) x[a] = origin[a] + (m[a] + 0.5) * dx;
    return x;
  }

  Point center(Index idx) const { return center(unflatten(idx)); }
};

/// Builds a grid, rejecting nonuniform spacing and undersized axes.
Grid make_grid(int n, const std::vector<Index>& cells, double dx,
               Boundary boundary,
               const std::vector<double>& origin = {});

/// Space-time region: a ball or box around `center` crossed with [t0, t1].
/// Mirrors the Q_{R,T} sets the estimates live on.
struct Region {
  enum class Shape { ball, box };
  Point center = Point::Zero();
  double radius = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  Shape shape = Shape::ball;

  bool contains_space(const Point& x, int n) const {
    if (shape == Shape::ball) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
      return s <= radius * radius;
    }
    for (int a = 0; a < n; ++a)
      if (std::abs(x[a] - center[a]) > radius) return false;
    return true;
  }

  bool contains_time(double t) const { return t >= t0 && t <= t1; }
};

/// Indices of all cells whose center lies in the region. Throws if empty.
std::vector<Index> cells_in_region(const Grid& grid, const Region& region);

}  // namespace carleman
