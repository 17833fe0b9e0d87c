#pragma once

#include <string>
#include <vector>

#include "carleman/grid.hpp"
#include "carleman/types.hpp"

namespace carleman {

/// Flat binary field snapshot.
///
/// Layout, little-endian:
///   u32 magic "CKS1", u32 solver kind, u32 n, u32 boundary,
///   u32[3] cells, f64 dx, f64[3] origin, f64 t, u32 field count,
/// followed by field-count blocks of grid-size f64 values in row-major
/// cell order.
struct Snapshot {
  enum class SolverKind : uint32_t { kinetic = 0, limit = 1 };
  SolverKind kind = SolverKind::kinetic;
  Grid grid;
  double t = 0.0;
  std::vector<Field> fields;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// CSV export: one row per cell with coordinates then field values.
void write_snapshot_csv(const std::string& path, const Grid& grid, double t,
                        const std::vector<Field>& fields,
                        const std::vector<std::string>& names);

}  // namespace carleman
