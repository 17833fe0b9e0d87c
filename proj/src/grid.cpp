#include "carleman/grid.hpp"

#include <cmath>

namespace carleman {

Grid make_grid(int n, const std::vector<Index>& cells, double dx,
               Boundary boundary, const std::vector<double>& origin) {
  if (n < 1 || n > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  if (static_cast<int>(cells.size()) != n)
    throw std::invalid_argument("grid: need one cell count per axis");
  if (!(dx > 0.0)) throw std::invalid_argument("grid: dx must be positive");
  for (Index c : cells)
    if (c < 4) throw std::invalid_argument("grid: need at least 4 cells per axis");
  if (!origin.empty() && static_cast<int>(origin.size()) != n)
    throw std::invalid_argument("grid: origin size mismatch");

  Grid g;
  g.n = n;
  g.dx = dx;
  g.boundary = boundary;
  for (int a = 0; a < n; ++a) {
    g.cells[a] = cells[a];
    g.origin[a] = origin.empty() ? 0.0 : origin[a];
  }
  return g;
}

std::vector<Index> cells_in_region(const Grid& grid, const Region& region) {
  std::vector<Index> out;
  const Index total = grid.size();
  for (Index idx = 0; idx < total; ++idx)
    if (region.contains_space(grid.center(idx), grid.n)) out.push_back(idx);
  if (out.empty())
    throw std::invalid_argument("region does not intersect the grid");
  return out;
}

}  // namespace carleman
