#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "carleman/diagnostics.hpp"
#include "carleman/kinetic_solver.hpp"

using namespace carleman;

namespace {

KineticState smooth_state(const Grid& g, int n, double base, double amp,
                          uint64_t seed = 0) {
  KineticState s = make_state(g, n);
  std::mt19937_64 rng(seed);
  const double phase = seed ? static_cast<double>(rng() >> 11) * 0x1.0p-53 : 0.0;
  for (Index idx = 0; idx < g.size(); ++idx) {
    const Point x = g.center(idx);
    double m = 1.0;
    for (int a = 0; a < n; ++a)
      m *= std::sin(2.0 * M_PI * (x[a] / g.extent(a) + phase));
    for (int i = 0; i < 2 * n; ++i) s.u[i][idx] = (base + amp * m) / (2 * n);
  }
  return s;
}

}  // namespace

TEST_CASE("streaming shifts by exactly one cell") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  const Grid g = make_grid(1, {8}, 0.5, Boundary::periodic);

  KineticState s = make_state(g, 1);
  s.u[0][3] = 1.0;
  s.u[1][3] = 1.0;
  const KineticState next = stream_step(s, p);
  CHECK(next.u[0][4] == 1.0);      // +e1 component moved right
  CHECK(next.u[0].sum() == 1.0);
  CHECK(next.u[1][2] == 1.0);      // -e1 component moved left
  CHECK(next.u[1].sum() == 1.0);
  CHECK(next.t == doctest::Approx(0.05));

  SUBCASE("periodic wrap") {
    KineticState e = make_state(g, 1);
    e.u[0][7] = 2.0;
    e.u[1][0] = 3.0;
    const KineticState w = stream_step(e, p);
    CHECK(w.u[0][0] == 2.0);
    CHECK(w.u[1][7] == 3.0);
  }

  SUBCASE("constants are invariant") {
    KineticState c = make_state(g, 1);
    c.u[0].setConstant(0.7);
    c.u[1].setConstant(0.7);
    const KineticState w = stream_step(c, p);
    CHECK((w.u[0] - 0.7).abs().maxCoeff() == 0.0);
    CHECK((w.u[1] - 0.7).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("frozen far field reads the analytic profile at ghost cells") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  const Grid g = make_grid(1, {8}, 0.5, Boundary::frozen_far_field);
  KineticState s = make_state(g, 1);
  s.u[0].setConstant(1.0);
  s.u[1].setConstant(1.0);
  const FarField ff = [](int comp, const Point&) {
    return comp == 0 ? 5.0 : 7.0;
  };
  const KineticState next = stream_step(s, p, &ff);
  CHECK(next.u[0][0] == 5.0);  // inflow from the left ghost
  CHECK(next.u[0][1] == 1.0);
  CHECK(next.u[1][7] == 7.0);  // inflow from the right ghost
  CHECK(next.u[1][6] == 1.0);

  CHECK_THROWS(stream_step(s, p));  // missing far field
}

TEST_CASE("collision step reproduces the linear relaxation closed forms") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  const Grid g = make_grid(1, {4}, 1.0, Boundary::periodic);
  RateSpec k{RateKind::power_sum, 0.0};

  KineticState s = make_state(g, 1);
  s.u[0].setConstant(1.0);
  s.u[1].setConstant(0.0);

  SUBCASE("one backward-Euler step: (u + r mean)/(1 + r), r = dt/eps^2") {
    const double dt = 0.01;  // r = 1
    const KineticState next = collide_step(s, p, k, dt);
    CHECK(next.u[0][0] == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(next.u[1][0] == doctest::Approx(0.25).epsilon(1e-13));
  }

  SUBCASE("sub-stepping approaches the exact exponential relaxation") {
    const int m = 2000;
    KineticState state = s;
    for (int i = 0; i < m; ++i) state = collide_step(state, p, k, 0.01 / m);
    const double exact = 0.5 + 0.5 * std::exp(-1.0);
    CHECK(std::abs(state.u[0][0] - exact) < 1.5e-4);
    CHECK(std::abs(state.u[0][0] - exact) > 1e-6);  // first order, not exact
  }

  SUBCASE("equilibrium is a fixed point for any alpha and dt") {
    for (double alpha : {-1.0, 0.0, 0.7}) {
      RateSpec ka{RateKind::power_sum, alpha};
      KineticState c = make_state(g, 1);
      c.u[0].setConstant(0.4);
      c.u[1].setConstant(0.4);
      const KineticState next = collide_step(c, p, ka, 0.05);
      CHECK((next.u[0] - 0.4).abs().maxCoeff() <= 1e-15);
      CHECK((next.u[1] - 0.4).abs().maxCoeff() <= 1e-15);
    }
  }
}

TEST_CASE("collision conserves the per-cell sum for every rate family") {
  std::mt19937_64 rng(4);
  auto uni = [&]() { return 0.05 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  ModelParams p;
  p.n = 2;
  p.epsilon = 0.1;
  const Grid g = make_grid(2, {4, 4}, 0.25, Boundary::periodic);
  for (RateKind kind : {RateKind::power_sum, RateKind::mean_field,
                        RateKind::power_difference}) {
    for (double alpha : {-1.0, -0.5, 0.5, 1.0}) {
      RateSpec k{kind, alpha};
      KineticState s = make_state(g, 2);
      for (Field& f : s.u)
        for (Index i = 0; i < f.size(); ++i) f[i] = 2.0 * uni();
      const KineticState next = collide_step(s, p, k, p.epsilon * g.dx);
      for (Index i = 0; i < g.size(); ++i) {
        double before = 0.0, after = 0.0;
        for (int c = 0; c < 4; ++c) {
          before += s.u[c][i];
          after += next.u[c][i];
        }
        CHECK(std::abs(after - before) <= 1e-13 * before);
      }
    }
  }
}

TEST_CASE("advance keeps constants and conserves mass") {
  ModelParams p;
  p.n = 2;
  p.epsilon = 0.1;
  const Grid g = make_grid(2, {16, 16}, 1.0 / 16, Boundary::periodic);
  RateSpec k{RateKind::power_sum, 0.5};

  SUBCASE("constant data is a fixed point") {
    KineticState s = make_state(g, 2);
    for (Field& f : s.u) f.setConstant(0.9);
    const KineticRun run = advance(s, p, k, 0.05, {0.05});
    REQUIRE(run.snapshots.size() == 1);
    for (const Field& f : run.snapshots[0].u)
      CHECK((f - 0.9).abs().maxCoeff() <= 1e-14);
  }

  SUBCASE("mass drift and bounds on wavy data") {
    const KineticState s = smooth_state(g, 2, 1.25, 0.75);
    const KineticRun run = advance(s, p, k, 0.1, {0.05, 0.1});
    const double m0 = run.log.front().mass;
    for (const StepLogEntry& e : run.log) {
      CHECK(std::abs(e.mass - m0) <= 1e-12 * m0);
      CHECK(e.min_u >= 0.5 / 4 - 1e-10);
      CHECK(e.max_u <= 2.0 / 4 + 1e-10);
    }
  }
}

TEST_CASE("comparison and contraction across a run") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  const Grid g = make_grid(1, {32}, 1.0 / 32, Boundary::periodic);
  const std::vector<double> snaps{0.025, 0.05, 0.075, 0.1};

  for (double alpha : {-1.0, 0.0, 1.0}) {
    RateSpec k{RateKind::power_sum, alpha};
    const KineticState u0 = smooth_state(g, 1, 1.0, 0.4, 1);
    KineticState v0 = smooth_state(g, 1, 1.2, 0.4, 1);

    const KineticRun ru = advance(u0, p, k, 0.1, snaps);
    const KineticRun rv = advance(v0, p, k, 0.1, snaps);

    // ordered initially, stays ordered
    double prev = positive_part_l1(ru.snapshots[0], rv.snapshots[0]);
    for (size_t s = 0; s < snaps.size(); ++s) {
      CHECK(ordering_margin(ru.snapshots[s], rv.snapshots[s]) >= -1e-10);
      const double pp = positive_part_l1(ru.snapshots[s], rv.snapshots[s]);
      CHECK(pp <= prev + 1e-8);
      prev = pp;
    }
  }

  SUBCASE("contraction for an unordered pair") {
    RateSpec k{RateKind::power_sum, 1.0};
    const KineticState u0 = smooth_state(g, 1, 1.0, 0.4, 2);
    const KineticState v0 = smooth_state(g, 1, 1.0, 0.4, 3);
    const KineticRun ru = advance(u0, p, k, 0.1, snaps);
    const KineticRun rv = advance(v0, p, k, 0.1, snaps);
    double prev = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < snaps.size(); ++s) {
      const double pp = positive_part_l1(ru.snapshots[s], rv.snapshots[s]);
      if (s > 0) CHECK(pp <= prev + 1e-8);
      prev = pp;
    }
  }
}

TEST_CASE("small-eps 1D runs track the heat-equation evolution") {
  // alpha = 0, n = 1: limit diffusivity 1/(n k) = 1; dx stays well under eps
  // so the relaxation bias does not mask the eps convergence
  const Grid g = make_grid(1, {256}, 1.0 / 256, Boundary::periodic);
  RateSpec k{RateKind::power_sum, 0.0};
  const double t_end = 0.025;

  const KineticState init = smooth_state(g, 1, 1.0, 0.4);
  ModelParams p;
  p.n = 1;
  p.alpha = 0.0;
  const Field rho0 = total_density(init);
  const LimitRun limit = advance_limit(rho0, p, g, t_end, {t_end});

  double prev_err = 1e300;
  for (double eps : {0.2, 0.1, 0.05}) {
    p.epsilon = eps;
    const KineticRun run = advance(init, p, k, t_end, {t_end});
    const double err =
        (total_density(run.snapshots.back()) - limit.snapshots.back().rho)
            .abs()
            .mean();
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 5e-3);
}

TEST_CASE("splitting converges at first order in dt") {
  // dt = eps dx, so halving dx halves dt; errors are measured against a
  // first-order Richardson reference built from the two finest runs
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  RateSpec k{RateKind::power_sum, 0.5};
  const double t_end = 0.1;

  auto run_rho = [&](Index cells) {
    const Grid g = make_grid(1, {cells}, 1.0 / cells, Boundary::periodic);
    const KineticState s = smooth_state(g, 1, 1.25, 0.25);
    const KineticRun run = advance(s, p, k, t_end, {t_end});
    return total_density(run.snapshots.back());
  };

  auto restrict_to = [](Field f, Index target) {
    while (f.size() > target) {
      Field c(f.size() / 2);
      for (Index i = 0; i < c.size(); ++i) c[i] = 0.5 * (f[2 * i] + f[2 * i + 1]);
      f = c;
    }
    return f;
  };

  const Field r128 = run_rho(128);
  const Field r256 = run_rho(256);
  const Field r512 = run_rho(512);
  const Field r1024 = run_rho(1024);
  const Field ref = 2.0 * restrict_to(r1024, 512) - r512;

  const double e128 = (r128 - restrict_to(ref, 128)).abs().mean();
  const double e256 = (r256 - restrict_to(ref, 256)).abs().mean();
  const double e512 = (r512 - ref).abs().mean();
  CHECK(std::log2(e128 / e256) >= 0.9);
  CHECK(std::log2(e256 / e512) >= 0.9);
}

TEST_CASE("3D streaming moves each component along its own axis") {
  ModelParams p;
  p.n = 3;
  p.epsilon = 0.1;
  const Grid g = make_grid(3, {4, 5, 6}, 0.5, Boundary::periodic);
  KineticState s = make_state(g, 3);
  const Index mark = g.flat(1, 2, 3);
  for (int i = 0; i < 6; ++i) s.u[i][mark] = 1.0 + i;
  const KineticState next = stream_step(s, p);
  CHECK(next.u[0][g.flat(2, 2, 3)] == 1.0);  // +e1
  CHECK(next.u[1][g.flat(1, 3, 3)] == 2.0);  // +e2
  CHECK(next.u[2][g.flat(1, 2, 4)] == 3.0);  // +e3
  CHECK(next.u[3][g.flat(0, 2, 3)] == 4.0);  // -e1
  CHECK(next.u[4][g.flat(1, 1, 3)] == 5.0);  // -e2
  CHECK(next.u[5][g.flat(1, 2, 2)] == 6.0);  // -e3
  for (int i = 0; i < 6; ++i) CHECK(next.u[i].sum() == 1.0 + i);
}

TEST_CASE("n=3 runs conserve mass and keep bounds and order") {
  ModelParams p;
  p.n = 3;
  p.alpha = 0.5;
  p.epsilon = 0.1;
  const Grid g = make_grid(3, {12, 12, 12}, 1.0 / 12, Boundary::periodic);
  RateSpec k{RateKind::power_sum, 0.5};

  const KineticState u0 = smooth_state(g, 3, 1.25, 0.75);
  KineticState v0 = u0;
  for (Field& f : v0.u) f += 0.2;

  const std::vector<double> snaps{0.05, 0.1};
  const KineticRun ru = advance(u0, p, k, 0.1, snaps);
  const KineticRun rv = advance(v0, p, k, 0.1, snaps);

  const double m0 = ru.log.front().mass;
  for (const StepLogEntry& e : ru.log) {
    CHECK(std::abs(e.mass - m0) <= 1e-12 * m0);
    CHECK(e.min_u >= 0.5 / 6 - 1e-10);
    CHECK(e.max_u <= 2.0 / 6 + 1e-10);
  }
  for (size_t s = 0; s < snaps.size(); ++s)
    CHECK(ordering_margin(ru.snapshots[s], rv.snapshots[s]) >= -1e-10);
}

TEST_CASE("alternative rate families run stably and conserve mass") {
  ModelParams p;
  p.n = 2;
  p.alpha = 0.25;  // inside the mean-field contractive band 1/(2n-1)
  p.epsilon = 0.1;
  const Grid g = make_grid(2, {16, 16}, 1.0 / 16, Boundary::periodic);
  for (RateKind kind : {RateKind::mean_field, RateKind::power_difference}) {
    RateSpec k{kind, 0.25};
    const KineticState u0 = smooth_state(g, 2, 1.25, 0.5);
    KineticState v0 = u0;
    for (Field& f : v0.u) f += 0.1;
    const std::vector<double> snaps{0.05, 0.1};
    const KineticRun ru = advance(u0, p, k, 0.1, snaps);
    const KineticRun rv = advance(v0, p, k, 0.1, snaps);
    const double m0 = ru.log.front().mass;
    CHECK(std::abs(ru.log.back().mass - m0) <= 1e-12 * m0);
    double prev = positive_part_l1(ru.snapshots[0], rv.snapshots[0]);
    for (size_t s = 1; s < snaps.size(); ++s) {
      const double pp = positive_part_l1(ru.snapshots[s], rv.snapshots[s]);
      CHECK(pp <= prev + 1e-8);
      prev = pp;
    }
  }
}

TEST_CASE("domain-of-dependence guard warns under frozen far field") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.05;
  const Grid g = make_grid(1, {32}, 1.0 / 32, Boundary::frozen_far_field);
  KineticState s = make_state(g, 1);
  s.u[0].setConstant(1.0);
  s.u[1].setConstant(1.0);
  const FarField ff = [](int, const Point&) { return 1.0; };
  Region roi = centered_box(g, 0.5);
  const KineticRun run = advance(s, p, {RateKind::power_sum, 0.0}, 0.1,
                                 {0.1}, {}, &ff, roi);
  CHECK(run.dod_warning);  // reach = 0.1/0.05 = 2 > distance 0.25
}

TEST_CASE("advance rejects frozen boundaries without a far field") {
  ModelParams p;
  p.n = 1;
  p.epsilon = 0.1;
  const Grid g = make_grid(1, {8}, 0.125, Boundary::frozen_far_field);
  KineticState s = make_state(g, 1);
  CHECK_THROWS(advance(s, p, {RateKind::power_sum, 0.0}, 0.1, {0.1}));
}
