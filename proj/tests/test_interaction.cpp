#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "carleman/interaction.hpp"

using namespace carleman;
using Eigen::VectorXd;

TEST_CASE("power-sum rate values") {
  RateSpec k{RateKind::power_sum, 1.0};
  CHECK(rate(k, 1.0, 1.0) == doctest::Approx(2.0));

  k.alpha = 0.0;
  CHECK(rate(k, 0.3, 7.0) == 1.0);
  CHECK(rate(k, 0.0, 0.0) == 1.0);

  k.alpha = -1.0;
  CHECK(rate(k, 1.0, 3.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(rate(k, 0.0, 0.0), std::domain_error);
}

TEST_CASE("rate symmetry") {
  std::mt19937_64 rng(11);
  auto uni = [&]() { return 0.01 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (RateKind kind : {RateKind::power_sum, RateKind::mean_field,
                        RateKind::power_difference}) {
    for (double alpha : {-1.0, -0.5, 0.25, 1.0}) {
      RateSpec k{kind, alpha};
      for (int s = 0; s < 200; ++s) {
        const double a = uni(), b = uni();
        CHECK(rate(k, a, b, 2) == rate(k, b, a, 2));
      }
    }
  }
}

TEST_CASE("admissibility bound brackets the rate on the box") {
  std::mt19937_64 rng(13);
  auto uni = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (double alpha : {-1.0, -0.4, 0.5, 1.0}) {
    RateSpec k{RateKind::power_sum, alpha};
    const double lambda = 4.0;
    const double M = rate_bound(k, lambda);
    for (int s = 0; s < 500; ++s) {
      const double a = 1.0 / lambda + (lambda - 1.0 / lambda) * uni();
      const double b = 1.0 / lambda + (lambda - 1.0 / lambda) * uni();
      const double v = rate(k, a, b);
      CHECK(v <= M * (1 + 1e-12));
      CHECK(v >= 1.0 / M * (1 - 1e-12));
    }
  }
}

TEST_CASE("collision map examples") {
  SUBCASE("n=1 alpha=1") {
    RateSpec k{RateKind::power_sum, 1.0};
    VectorXd u(2);
    u << 2.0, 1.0;
    const VectorXd a = collision_map(k, u);
    CHECK(a[0] == doctest::Approx(-3.0));
    CHECK(a[1] == doctest::Approx(3.0));
  }
  SUBCASE("equilibrium is a zero of the map") {
    for (RateKind kind : {RateKind::power_sum, RateKind::mean_field,
                          RateKind::power_difference}) {
      RateSpec k{kind, 0.5};
      VectorXd u = VectorXd::Constant(4, 0.37);
      CHECK(collision_map(k, u).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }
  SUBCASE("n=1 alpha=0") {
    RateSpec k{RateKind::power_sum, 0.0};
    VectorXd u(2);
    u << 1.0, 0.0;
    const VectorXd a = collision_map(k, u);
    CHECK(a[0] == doctest::Approx(-1.0));
    CHECK(a[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("collision map conserves the component sum") {
  std::mt19937_64 rng(17);
  auto uni = [&]() { return 0.01 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (RateKind kind : {RateKind::power_sum, RateKind::power_difference}) {
    for (double alpha : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      RateSpec k{kind, alpha};
      for (int n : {1, 2, 3}) {
        for (int s = 0; s < 200; ++s) {
          VectorXd u(2 * n);
          for (int i = 0; i < 2 * n; ++i) u[i] = 100.0 * uni();
          const VectorXd a = collision_map(k, u);
          CHECK(std::abs(a.sum()) <= 1e-13 * u.lpNorm<Eigen::Infinity>() *
                                         std::max(1.0, a.lpNorm<Eigen::Infinity>()));
        }
      }
    }
  }
}

TEST_CASE("collision jacobian matches finite differences") {
  std::mt19937_64 rng(23);
  auto uni = [&]() { return 0.2 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (RateKind kind : {RateKind::power_sum, RateKind::mean_field,
                        RateKind::power_difference}) {
    RateSpec k{kind, 0.5};
    VectorXd u(4);
    for (int i = 0; i < 4; ++i) u[i] = uni();
    const Eigen::MatrixXd J = collision_jacobian(k, u);
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
      VectorXd up = u, um = u;
      up[j] += h;
      um[j] -= h;
      const VectorXd col = (collision_map(k, up) - collision_map(k, um)) / (2 * h);
      for (int i = 0; i < 4; ++i)
        CHECK(J(i, j) == doctest::Approx(col[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("monotone relaxation shrinks the spread") {
  std::mt19937_64 rng(29);
  auto uni = [&]() { return 0.1 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  RateSpec k{RateKind::power_sum, 0.5};
  for (int s = 0; s < 100; ++s) {
    VectorXd u(4);
    for (int i = 0; i < 4; ++i) u[i] = uni();
    const double tau = 0.01;
    const VectorXd v = u + tau * collision_map(k, u);
    const double spread_before = u.maxCoeff() - u.minCoeff();
    const double spread_after = v.maxCoeff() - v.minCoeff();
    CHECK(spread_after <= spread_before + 1e-15);
  }
}

TEST_CASE("T-dissipativity hand example") {
  RateSpec k{RateKind::power_sum, 1.0};
  VectorXd u(2), v(2);
  u << 2.0, 1.0;
  v << 1.0, 2.0;
  const VectorXd d = collision_map(k, u) - collision_map(k, v);
  double dot = 0.0;
  for (int i = 0; i < 2; ++i) dot += d[i] * sgn_plus(u[i] - v[i]);
  CHECK(dot == doctest::Approx(-6.0));

  // identical arguments give zero
  const VectorXd z = collision_map(k, u) - collision_map(k, u);
  CHECK(z.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("randomized T-dissipativity certificate, contractive range") {
  for (double alpha : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    RateSpec k{RateKind::power_sum, alpha};
    for (int n : {1, 2}) {
      const auto rep = t_dissipativity_test(k, n, 5000, 0.01, 100.0, 420);
      CHECK(rep.max_violation <= 1e-12);
    }
  }
}

TEST_CASE("alpha = 1.5 violates T-dissipativity") {
  RateSpec k{RateKind::power_sum, 1.5};
  const auto rep = t_dissipativity_test(k, 1, 20000, 0.01, 10.0, 77);
  CHECK(rep.max_violation > 1e-6);
}

TEST_CASE("mean-field rate outside its contractive band") {
  // L1 contraction holds for alpha in [-1, 1/(2n-1)]; above it a violation
  // should be found
  const int n = 2;
  RateSpec inside{RateKind::mean_field, 0.25};  // 1/(2n-1) = 1/3
  const auto ok = t_dissipativity_test(inside, n, 20000, 0.01, 10.0, 99);
  CHECK(ok.max_violation <= 1e-12);

  RateSpec outside{RateKind::mean_field, 1.0};
  const auto bad = t_dissipativity_test(outside, n, 20000, 0.01, 10.0, 99);
  CHECK(bad.max_violation > 1e-6);
}
