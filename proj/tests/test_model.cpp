#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "carleman/model.hpp"
#include "carleman/snapshot_io.hpp"

using namespace carleman;

namespace {

KineticState random_state(const Grid& g, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  KineticState s = make_state(g, n);
  for (Field& f : s.u)
    for (Index i = 0; i < f.size(); ++i)
      f[i] = 0.1 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return s;
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g1 = make_grid(1, {8}, 0.5, Boundary::periodic);
  CHECK(g1.extent(0) == doctest::Approx(4.0));
  CHECK(g1.size() == 8);

  const Grid g2 = make_grid(2, {64, 64}, 0.125, Boundary::frozen_far_field);
  CHECK(g2.size() == 4096);

  CHECK_THROWS(make_grid(2, {64, 3}, 0.1, Boundary::periodic));
  CHECK_THROWS(make_grid(2, {64, 64}, -0.1, Boundary::periodic));
  CHECK_THROWS(make_grid(4, {8, 8, 8}, 0.1, Boundary::periodic));
}

TEST_CASE("moments formulas") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  Grid g = make_grid(1, {4}, 1.0, Boundary::periodic);
  KineticState s = make_state(g, 1);
  s.u[0].setConstant(0.6);
  s.u[1].setConstant(0.4);
  const MacroState m = moments(s, p);
  CHECK(m.rho[0] == doctest::Approx(1.0));
  CHECK(m.current[0][0] == doctest::Approx(2.0));
  CHECK(m.current_pair[0][1][0] == doctest::Approx(2.0));

  SUBCASE("isotropic state has zero currents") {
    ModelParams p2;
    p2.n = 2;
    p2.epsilon = 0.3;
    Grid g2 = make_grid(2, {4, 4}, 1.0, Boundary::periodic);
    KineticState s2 = make_state(g2, 2);
    for (Field& f : s2.u) f.setConstant(0.7);
    const MacroState m2 = moments(s2, p2);
    CHECK(m2.rho[0] == doctest::Approx(4 * 0.7));
    for (const Field& j : m2.current) CHECK(j.abs().maxCoeff() == 0.0);
    for (const auto& row : m2.current_pair)
      for (const Field& j : row) CHECK(j.abs().maxCoeff() == 0.0);
  }

  SUBCASE("n=2 example values") {
    ModelParams p2;
    p2.n = 2;
    p2.epsilon = 0.5;
    Grid g2 = make_grid(2, {4, 4}, 1.0, Boundary::periodic);
    KineticState s2 = make_state(g2, 2);
    for (int i = 0; i < 4; ++i) s2.u[i].setConstant(i + 1.0);
    const MacroState m2 = moments(s2, p2);
    CHECK(m2.rho[0] == doctest::Approx(10.0));
    CHECK(m2.rho_pair[0][0] == doctest::Approx(4.0));
    CHECK(m2.current[0][0] == doctest::Approx(-4.0));
    CHECK(m2.current_pair[0][1][0] == doctest::Approx(-2.0));
  }
}

TEST_CASE("moment reconstruction recovers the state to machine precision") {
  ModelParams p;
  p.n = 3;
  p.epsilon = 0.05;
  const Grid g = make_grid(3, {5, 4, 6}, 0.2, Boundary::periodic);
  const KineticState s = random_state(g, 3, 91);
  const MacroState m = moments(s, p);
  const KineticState r = reconstruct(m, g, p);
  for (int i = 0; i < 6; ++i)
    CHECK((r.u[i] - s.u[i]).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("pair currents are antisymmetric up to sign, bitwise") {
  ModelParams p;
  p.n = 2;
  p.epsilon = 0.2;
  const Grid g = make_grid(2, {6, 6}, 0.5, Boundary::periodic);
  const KineticState s = random_state(g, 2, 7);
  const MacroState m = moments(s, p);
  for (int i = 0; i < 4; ++i) {
    CHECK(m.current_pair[i][i].abs().maxCoeff() == 0.0);
    for (int j = 0; j < 4; ++j)
      for (Index c = 0; c < g.size(); ++c)
        CHECK(m.current_pair[i][j][c] == -m.current_pair[j][i][c]);
  }
}

TEST_CASE("norms") {
  const Grid g = make_grid(1, {8}, 0.5, Boundary::periodic);
  Region all = whole_domain(g);

  Field c = Field::Constant(8, 1.3);
  CHECK(norm_on(c, g, all, Norm::L1) == doctest::Approx(1.3 * 4.0));

  Field z = Field::Zero(8);
  CHECK(norm_on(z, g, all, Norm::L1) == 0.0);
  CHECK(norm_on(z, g, all, Norm::L2) == 0.0);
  CHECK(norm_on(z, g, all, Norm::Linf) == 0.0);

  SUBCASE("hand Riemann sum for L2") {
    Field f = Field::Zero(8);
    f[2] = 1.0;
    f[3] = -2.0;
    // sqrt((1 + 4) * 0.5) = 1.5811388300841898
    CHECK(norm_on(f, g, all, Norm::L2) ==
          doctest::Approx(1.5811388300841898).epsilon(1e-14));
    CHECK(norm_on(f, g, all, Norm::Linf) == doctest::Approx(2.0));
  }

  SUBCASE("monotone in the region for nonnegative fields") {
    const Grid g2 = make_grid(2, {16, 16}, 0.25, Boundary::periodic);
    const KineticState s = random_state(g2, 2, 3);
    Region small = centered_box(g2, 0.4);
    Region big = centered_box(g2, 0.8);
    for (const Field& f : s.u)
      CHECK(norm_on(f, g2, small, Norm::L1) <= norm_on(f, g2, big, Norm::L1));
  }

  SUBCASE("empty region intersection is an error") {
    Region r;
    r.center = Point(100.0, 0.0, 0.0);
    r.radius = 0.1;
    CHECK_THROWS(norm_on(c, g, r, Norm::L1));
  }
}

TEST_CASE("cutoffs vanish outside support and stay in [0,1]") {
  for (auto kind : {TestCutoff::Kind::smooth_bump, TestCutoff::Kind::tensor_cosine}) {
    TestCutoff phi;
    phi.kind = kind;
    phi.radius = 0.8;
    std::mt19937_64 rng(5);
    auto uni = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < 500; ++s) {
      Point x(4.0 * uni() - 2.0, 4.0 * uni() - 2.0, 0.0);
      const double v = phi(x, 2);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      double r2 = x[0] * x[0] + x[1] * x[1];
      if (r2 >= phi.radius * phi.radius &&
          kind == TestCutoff::Kind::smooth_bump)
        CHECK(v == 0.0);
    }
    CHECK(phi(Point::Zero(), 2) == doctest::Approx(1.0));
    // sampled C^1: finite-difference gradient bounded
    const double h = 1e-5;
    for (int s = 0; s < 100; ++s) {
      Point x(1.6 * uni() - 0.8, 1.6 * uni() - 0.8, 0.0);
      Point xp = x, xm = x;
      xp[0] += h;
      xm[0] -= h;
      const double grad = (phi(xp, 2) - phi(xm, 2)) / (2 * h);
      CHECK(std::abs(grad) < 10.0);
    }
  }
}

TEST_CASE("binary snapshot round trip") {
  const Grid g = make_grid(2, {5, 7}, 0.25, Boundary::frozen_far_field);
  KineticState s = random_state(g, 2, 17);
  Snapshot snap;
  snap.kind = Snapshot::SolverKind::kinetic;
  snap.grid = g;
  snap.t = 0.375;
  snap.fields = s.u;

  const std::string path = "roundtrip.cks";
  write_snapshot(path, snap);
  const Snapshot back = read_snapshot(path);
  CHECK(back.t == snap.t);
  CHECK(back.grid.n == 2);
  CHECK(back.grid.cells[0] == 5);
  CHECK(back.grid.cells[1] == 7);
  CHECK(back.grid.dx == 0.25);
  CHECK(back.grid.boundary == Boundary::frozen_far_field);
  REQUIRE(back.fields.size() == 4);
  for (int i = 0; i < 4; ++i)
    for (Index c = 0; c < g.size(); ++c)
      CHECK(back.fields[i][c] == snap.fields[i][c]);
  std::remove(path.c_str());
}

TEST_CASE("binary snapshot layout is pinned") {
  // header: magic, kind, n, boundary, cells[3], dx, origin[3], t, count
  const Grid g = make_grid(1, {4}, 1.0, Boundary::periodic);
  Snapshot snap;
  snap.grid = g;
  snap.t = 2.0;
  snap.fields = {Field::Constant(4, 1.0)};
  const std::string path = "layout.cks";
  write_snapshot(path, snap);
  std::ifstream is(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  // 8 u32 header words, 5 f64 header values, 4 f64 cells
  REQUIRE(bytes.size() == 8 * 4 + 5 * 8 + 4 * 8);
  CHECK(bytes[0] == 'C');
  CHECK(bytes[1] == 'K');
  CHECK(bytes[2] == 'S');
  CHECK(bytes[3] == '1');
  // little-endian n at offset 8
  CHECK(bytes[8] == 1);
  std::remove(path.c_str());
}

TEST_CASE("csv export has one row per cell") {
  const Grid g = make_grid(2, {4, 4}, 0.5, Boundary::periodic);
  const std::string path = "export.csv";
  write_snapshot_csv(path, g, 0.0, {Field::Constant(16, 2.0)}, {"rho"});
  std::ifstream is(path);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2 + 16);  // comment + header + cells
  std::remove(path.c_str());
}
