#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "carleman/initial_data.hpp"

using namespace carleman;

namespace {

ModelParams params(int n, double alpha) {
  ModelParams p;
  p.n = n;
  p.alpha = alpha;
  p.epsilon = 0.1;
  return p;
}

}  // namespace

TEST_CASE("primitive evaluation") {
  CHECK(constant_primitive(0.7).eval(Point(3.0, 1.0, 0.0), 2) == 0.7);

  const Primitive tail = power_tail(4.0, 2.0, 1.0);
  CHECK(tail.eval(Point(1.0, 0.0, 0.0), 3) == doctest::Approx(2.0));
  CHECK(tail.eval(Point::Zero(), 3) == doctest::Approx(4.0));

  const Primitive bump = gaussian_bump(0.5, 0.3, Point(1.0, 0.0, 0.0));
  CHECK(bump.eval(Point(1.0, 0.0, 0.0), 2) == doctest::Approx(0.5));
  CHECK(bump.eval(Point(10.0, 0.0, 0.0), 2) < 1e-10);

  CHECK_THROWS(constant_primitive(-1.0));
  CHECK_THROWS(power_tail(1.0, -2.0, 1.0));
}

TEST_CASE("build samples recipes on cell centers") {
  const Grid g = make_grid(2, {8, 8}, 0.5, Boundary::periodic, {-2.0, -2.0});
  const ModelParams p = params(2, 0.5);

  ComponentRecipe r;
  r.parts = {constant_primitive(0.7)};
  const auto fields = build(isotropic_data(2, r), g, p);
  REQUIRE(fields.size() == 4);
  for (const Field& f : fields) CHECK((f - 0.7).abs().maxCoeff() == 0.0);

  SUBCASE("superposition at a bump center") {
    ComponentRecipe rb;
    rb.parts = {constant_primitive(0.5),
                gaussian_bump(0.25, 0.4, Point(-0.75, 0.25, 0.0))};
    const auto fb = build(isotropic_data(2, rb), g, p);
    // (-0.75, 0.25) is a cell center for this grid
    bool found = false;
    for (Index idx = 0; idx < g.size(); ++idx) {
      const Point x = g.center(idx);
      if (std::abs(x[0] + 0.75) < 1e-12 && std::abs(x[1] - 0.25) < 1e-12) {
        CHECK(fb[0][idx] == doctest::Approx(0.75));
        found = true;
      }
    }
    CHECK(found);
  }

  SUBCASE("monotone in the recipe") {
    ComponentRecipe lo, hi;
    lo.parts = {constant_primitive(0.5), gaussian_bump(0.1, 0.5)};
    hi.parts = {constant_primitive(0.5), gaussian_bump(0.3, 0.5)};
    const auto flo = build(isotropic_data(2, lo), g, p);
    const auto fhi = build(isotropic_data(2, hi), g, p);
    for (int i = 0; i < 4; ++i) CHECK((fhi[i] - flo[i]).minCoeff() >= 0.0);
  }

  SUBCASE("fast power tails are rejected in the subcritical band") {
    ComponentRecipe bad;
    bad.parts = {power_tail(1.0, 4.0, 1.0)};  // decays like |x|^-4, 2/alpha = 2
    CHECK_THROWS(build(isotropic_data(3, bad), make_grid(3, {4, 4, 4}, 1.0,
                                                         Boundary::periodic),
                       params(3, 1.0)));
  }
}

TEST_CASE("sandwich truncation") {
  const ModelParams p = params(3, 1.0);
  const Grid g = make_grid(3, {12, 12, 12}, 0.5, Boundary::periodic,
                           {-3.0, -3.0, -3.0});

  BarrierSpec lower;
  lower.kind = BarrierCase::fde_supercritical;
  lower.n = 3;
  lower.alpha = 1.0;
  lower.T = 1.0;

  BarrierSpec upper;
  upper.kind = BarrierCase::super_fde;
  upper.n = 3;
  upper.alpha = 1.0;
  upper.T = 1.0;

  ComponentRecipe r;
  r.parts = {power_tail(4.0, 2.0, 1.0)};
  const auto gfields = build(isotropic_data(3, r), g, p);

  SUBCASE("gap decreases monotonically in the level") {
    double prev = std::numeric_limits<double>::infinity();
    for (double m : {8.0, 16.0, 32.0, 64.0}) {
      const SandwichResult res = sandwich_truncate(gfields, g, m, lower, upper, p);
      CHECK(res.l1_gap < prev);
      prev = res.l1_gap;
      for (int i = 0; i < 6; ++i) CHECK((res.g_m[i] >= 0.0).all());
    }
  }

  SUBCASE("idempotent") {
    const SandwichResult once = sandwich_truncate(gfields, g, 8.0, lower, upper, p);
    const SandwichResult twice =
        sandwich_truncate(once.g_m, g, 8.0, lower, upper, p);
    CHECK(twice.l1_gap == 0.0);
    for (int i = 0; i < 6; ++i)
      CHECK((twice.g_m[i] - once.g_m[i]).abs().maxCoeff() == 0.0);
  }

  SUBCASE("zero data is lifted to the lower trace") {
    std::vector<Field> zero(6, Field::Zero(g.size()));
    const SandwichResult res = sandwich_truncate(zero, g, 8.0, lower, upper, p);
    BarrierSpec lo_m = lower.resolved();
    lo_m.R = 8.0;
    const Field expect = psi_field(lo_m, g, 0.0) * (3.0 / 12.0);
    for (int i = 0; i < 6; ++i)
      CHECK((res.g_m[i] - expect).abs().maxCoeff() <= 1e-15);
  }

  SUBCASE("crossed barriers are rejected") {
    // at level m = 1 the upper Gaussian amplitude is far below the lower trace
    CHECK_THROWS(sandwich_truncate(gfields, g, 1.0, lower, upper, p));
  }
}

TEST_CASE("l1 perturbations keep the envelope and record their budget") {
  ComponentRecipe r;
  r.parts = {constant_primitive(1.0)};
  InitialDataSpec spec = isotropic_data(2, r);
  add_l1_perturbation(spec, 0, 2, gaussian_bump(0.5, 0.3));
  add_l1_perturbation(spec, 2, 2, gaussian_bump(0.2, 0.1, Point(1.0, 0.0, 0.0)));

  // budget = sum of amp (w sqrt(pi))^n
  const double expect = 0.5 * std::pow(0.3 * std::sqrt(M_PI), 2) +
                        0.2 * std::pow(0.1 * std::sqrt(M_PI), 2);
  CHECK(spec.l1_budget == doctest::Approx(expect).epsilon(1e-14));
  REQUIRE(spec.f.size() == 4);
  CHECK(spec.f[0].parts.size() == 1);  // envelope froze the unperturbed recipe
  CHECK(spec.g[0].parts.size() == 2);

  // the envelope, not the bumps, drives the horizon metadata
  ModelParams p;
  p.n = 2;
  p.alpha = 0.5;
  p.epsilon = 0.1;
  const TailInfo t0 = tail_info(spec.envelope(0), p);
  const TailInfo tg = tail_info(spec.g[0], p);
  CHECK(t0.liminf_power == tg.liminf_power);  // bumps do not change the tail
}

TEST_CASE("horizon arithmetic") {
  SUBCASE("subcritical power tail: T1 = A^(1/alpha)") {
    ComponentRecipe r;
    r.parts = {power_tail(4.0, 2.0, 1.0)};
    const Horizons h = horizon_estimate(isotropic_data(3, r), params(3, 1.0));
    CHECK(h.T1 == doctest::Approx(4.0));
    CHECK(std::isinf(h.T2));  // bounded data, log branch is zero
  }

  SUBCASE("pme range: T1 is infinite") {
    ComponentRecipe r;
    r.parts = {constant_primitive(1.0)};
    const Horizons h = horizon_estimate(isotropic_data(2, r), params(2, -0.5));
    CHECK(std::isinf(h.T1));
    CHECK(std::isinf(h.T2));  // bounded data under the power branch
  }

  SUBCASE("growing pme data gives a finite T2") {
    BarrierSpec grow;
    grow.kind = BarrierCase::super_pme;
    grow.n = 2;
    grow.alpha = -0.5;
    grow.T = 1.0;
    ComponentRecipe r;
    r.parts = {barrier_trace(grow, 1.0)};
    const Horizons h = horizon_estimate(isotropic_data(2, r), params(2, -0.5));
    // C_alpha = (3 sqrt 2)^(1/alpha) = 1/18; T2 = (C_alpha)^(1/alpha) = 324
    CHECK(h.T2 == doctest::Approx(324.0).epsilon(1e-12));
    CHECK(std::isinf(h.T1));
  }

  SUBCASE("exponential growth caps T2 in the heat branch") {
    BarrierSpec grow;
    grow.kind = BarrierCase::super_heat;
    grow.n = 2;
    grow.alpha = 0.0;
    grow.T = 2.0;
    ComponentRecipe r;
    r.parts = {barrier_trace(grow, 1.0)};
    const Horizons h = horizon_estimate(isotropic_data(2, r), params(2, 0.0));
    // limsup |x|^-2 log(f+1) = c_hat n / (4T) = 0.75*2/8; T2 is its inverse
    CHECK(h.T2 == doctest::Approx(8.0 / 1.5));
  }

  SUBCASE("scale covariance in the subcritical branch") {
    for (double alpha : {1.0, 0.8}) {
      ComponentRecipe r1, r2;
      r1.parts = {power_tail(2.0, 2.0 / alpha, 1.0)};
      r2.parts = {power_tail(6.0, 2.0 / alpha, 1.0)};
      const Horizons h1 = horizon_estimate(isotropic_data(3, r1), params(3, alpha));
      const Horizons h2 = horizon_estimate(isotropic_data(3, r2), params(3, alpha));
      CHECK(h2.T1 / h1.T1 == doctest::Approx(std::pow(3.0, 1.0 / alpha)));
    }
  }

  SUBCASE("constants dominate the liminf in the subcritical band") {
    ComponentRecipe r;
    r.parts = {constant_primitive(0.3), power_tail(4.0, 2.0, 1.0)};
    const Horizons h = horizon_estimate(isotropic_data(3, r), params(3, 1.0));
    CHECK(std::isinf(h.T1));
  }
}
