#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "carleman/barriers.hpp"
#include "carleman/diagnostics.hpp"
#include "carleman/limit_solver.hpp"

using namespace carleman;

namespace {

// periodic heat kernel on [0, L): sum of Gaussian images
double wrapped_gaussian(double x, double tau, double L) {
  double v = 0.0;
  for (int k = -6; k <= 6; ++k)
    v += std::exp(-(x + k * L) * (x + k * L) / (4.0 * tau)) /
         std::sqrt(4.0 * M_PI * tau);
  return v;
}

}  // namespace

TEST_CASE("diffusivity closed form") {
  ModelParams p;
  p.n = 2;
  p.alpha = 0.0;
  p.epsilon = 1.0;
  CHECK(diffusivity(p, 3.7) == doctest::Approx(0.5));

  p.alpha = 1.0;
  CHECK(diffusivity(p, 2.0) == doctest::Approx(0.5));

  p.alpha = -1.0;
  CHECK(diffusivity(p, 0.5) == doctest::Approx(0.125));

  CHECK_THROWS_AS(diffusivity(p, 0.0), std::domain_error);
  CHECK_THROWS_AS(diffusivity(p, -1.0), std::domain_error);
}

TEST_CASE("constant density stays constant") {
  ModelParams p;
  p.n = 2;
  p.alpha = 0.6;
  p.epsilon = 1.0;
  const Grid g = make_grid(2, {16, 16}, 0.0625, Boundary::periodic);
  const Field rho0 = Field::Constant(g.size(), 1.4);
  const LimitRun run = advance_limit(rho0, p, g, 0.1, {0.05, 0.1});
  REQUIRE(run.snapshots.size() == 2);
  for (const LimitSnapshot& s : run.snapshots)
    CHECK((s.rho - 1.4).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("mass conservation and maximum principle, periodic") {
  ModelParams p;
  p.n = 2;
  p.alpha = -0.5;
  p.epsilon = 1.0;
  const Grid g = make_grid(2, {32, 32}, 1.0 / 32, Boundary::periodic);
  Field rho0(g.size());
  for (Index idx = 0; idx < g.size(); ++idx) {
    const Point x = g.center(idx);
    rho0[idx] = 1.25 + 0.7 * std::sin(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[1]);
  }
  const LimitRun run = advance_limit(rho0, p, g, 0.05, {0.01, 0.05});
  const double m0 = mass(rho0, g);
  double prev_min = rho0.minCoeff(), prev_max = rho0.maxCoeff();
  for (const LimitSnapshot& s : run.snapshots) {
    CHECK(std::abs(mass(s.rho, g) - m0) <= 1e-10 * m0);
    CHECK(s.rho.minCoeff() >= prev_min - 1e-12);
    CHECK(s.rho.maxCoeff() <= prev_max + 1e-12);
    prev_min = s.rho.minCoeff();
    prev_max = s.rho.maxCoeff();
  }
}

TEST_CASE("alpha = 0 run matches the heat kernel at second order") {
  ModelParams p;
  p.n = 1;
  p.alpha = 0.0;
  p.epsilon = 1.0;
  const double tau0 = 0.005, t_end = 0.005, L = 1.0;

  auto l1_error = [&](Index cells) {
    const Grid g = make_grid(1, {cells}, L / cells, Boundary::periodic);
    Field rho0(g.size());
    for (Index i = 0; i < g.size(); ++i)
      rho0[i] = 0.1 + wrapped_gaussian(g.center(i)[0] - 0.5 * L, tau0, L);
    const LimitRun run = advance_limit(rho0, p, g, t_end, {t_end});
    double err = 0.0;
    for (Index i = 0; i < g.size(); ++i)
      err += std::abs(run.snapshots.back().rho[i] -
                      (0.1 + wrapped_gaussian(g.center(i)[0] - 0.5 * L,
                                              tau0 + t_end, L)));
    return err * g.dx;
  };

  const double e64 = l1_error(64);
  const double e128 = l1_error(128);
  const double order = std::log2(e64 / e128);
  CHECK(order >= 1.8);
}

TEST_CASE("pme subsolution stays below the evolving density") {
  // alpha in [-1,0): data above the separable barrier at t=0 remains above it
  ModelParams p;
  p.n = 2;
  p.alpha = -0.5;
  p.epsilon = 1.0;
  BarrierSpec psi;
  psi.kind = BarrierCase::pme_separable;
  psi.n = 2;
  psi.alpha = -0.5;
  psi.R = 1.0;
  psi.T = 1.0;

  const Grid g = make_grid(2, {48, 48}, 4.0 / 48, Boundary::frozen_far_field,
                           {-2.0, -2.0});
  Field rho0(g.size());
  for (Index idx = 0; idx < g.size(); ++idx)
    rho0[idx] = psi_eval(psi, g.center(idx), 0.0) + 0.01;
  const ScalarFarField ff = [&](const Point& x) {
    return psi_eval(psi, x, 0.0) + 0.01;
  };
  const LimitRun run = advance_limit(rho0, p, g, 0.5, {0.25, 0.5}, {}, &ff);
  for (const LimitSnapshot& s : run.snapshots) {
    const Field barrier = psi_field(psi, g, s.t);
    CHECK((s.rho - barrier).minCoeff() >= -1e-6);
  }
}

TEST_CASE("dt underflow guard trips when D blows up") {
  ModelParams p;
  p.n = 1;
  p.alpha = 1.0;  // D = rho^-1, floor-level density drives D to 1e12
  p.epsilon = 1.0;
  const Grid g = make_grid(1, {16}, 0.0625, Boundary::periodic);
  Field rho0 = Field::Constant(g.size(), kDensityFloor);
  LimitOptions opts;
  opts.min_dt = 1e-6;
  CHECK_THROWS_AS(advance_limit(rho0, p, g, 1.0, {1.0}, opts),
                  std::runtime_error);
}
