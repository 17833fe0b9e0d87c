#include "carleman/snapshot_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace carleman {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

namespace {

constexpr uint32_t kMagic = 0x31534B43;  // "CKS1"

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated file");
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path);
  put<uint32_t>(os, kMagic);
  put<uint32_t>(os, static_cast<uint32_t>(snap.kind));
  put<uint32_t>(os, static_cast<uint32_t>(snap.grid.n));
  put<uint32_t>(os, static_cast<uint32_t>(snap.grid.boundary));
  for (int a = 0; a < 3; ++a)
    put<uint32_t>(os, static_cast<uint32_t>(snap.grid.cells[a]));
  put<double>(os, snap.grid.dx);
  for (int a = 0; a < 3; ++a) put<double>(os, snap.grid.origin[a]);
  put<double>(os, snap.t);
  put<uint32_t>(os, static_cast<uint32_t>(snap.fields.size()));
  for (const Field& f : snap.fields) {
    if (f.size() != snap.grid.size())
      throw std::invalid_argument("snapshot: field size does not match grid");
    os.write(reinterpret_cast<const char*>(f.data()),
             static_cast<std::streamsize>(sizeof(double) * f.size()));
  }
  if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  if (get<uint32_t>(is) != kMagic)
    throw std::runtime_error("snapshot: bad magic in " + path);
  Snapshot snap;
  snap.kind = static_cast<Snapshot::SolverKind>(get<uint32_t>(is));
  snap.grid.n = static_cast<int>(get<uint32_t>(is));
  snap.grid.boundary = static_cast<Boundary>(get<uint32_t>(is));
  for (int a = 0; a < 3; ++a) snap.grid.cells[a] = get<uint32_t>(is);
  snap.grid.dx = get<double>(is);
  for (int a = 0; a < 3; ++a) snap.grid.origin[a] = get<double>(is);
  snap.t = get<double>(is);
  const uint32_t count = get<uint32_t>(is);
  snap.fields.assign(count, Field(snap.grid.size()));
  for (Field& f : snap.fields) {
    is.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(sizeof(double) * f.size()));
    if (!is) throw std::runtime_error("snapshot: truncated data in " + path);
  }
  return snap;
}

void write_snapshot_csv(const std::string& path, const Grid& grid, double t,
                        const std::vector<Field>& fields,
                        const std::vector<std::string>& names) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path);
  os << "# t=";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  os << buf << "\n";
  const char* axes[3] = {"x", "y", "z"};
  for (int a = 0; a < grid.n; ++a) os << axes[a] << ",";
  for (size_t i = 0; i < fields.size(); ++i) {
    os << (i < names.size() ? names[i] : "f" + std::to_string(i));
    os << (i + 1 < fields.size() ? "," : "\n");
  }
  for (Index idx = 0; idx < grid.size(); ++idx) {
    const Point x = grid.center(idx);
    for (int a = 0; a < grid.n; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g,", x[a]);
      os << buf;
    }
    for (size_t i = 0; i < fields.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", fields[i][idx]);
      os << buf << (i + 1 < fields.size() ? "," : "\n");
    }
  }
}

}  // namespace carleman
