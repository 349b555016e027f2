#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/kernel.hpp"
#include "fluxchemo/quadrature.hpp"

using namespace fluxchemo;
using doctest::Approx;

TEST_CASE("frozen oracle values") {
  // Reference values computed with mpmath at 30 digits.
  CHECK(fluxchemo::erfc(1.0) == Approx(0.1572992070502851).epsilon(1e-15));
  CHECK(c2_partial(3) == Approx(1.581054385611135).epsilon(1e-14));
  CHECK(c2_series() == Approx(1.5810543856350906).epsilon(1e-14));
  CHECK(kernel_bound_factor(0.0, 1.0, 1.0) == Approx(0.09982061418712283).epsilon(1e-13));
  CHECK(harnack_constant(1.0).a == Approx(0.0062873894427446).epsilon(1e-8));
  CHECK(harnack_constant(2.0).a == Approx(0.0019142295146480).epsilon(1e-8));
  CHECK(harnack_constant(5.0).a == Approx(1.7230890220145e-6).epsilon(1e-8));
  CHECK(harnack_constant(10.0).a == Approx(4.40478248879e-16).epsilon(1e-8));
}

TEST_CASE("erfc agrees with quadrature of its defining integral") {
  for (double x : {-1.0, 0.0, 0.3, 1.0, 2.0, 3.5, 5.0}) {
    const double tail = integrate([](double s) { return std::exp(-s * s); }, x, x + 12.0, 256, 12);
    CHECK(fluxchemo::erfc(x) == Approx(2.0 / std::sqrt(std::numbers::pi) * tail).epsilon(1e-12));
  }
}

TEST_CASE("zero drift reproduces the heat kernel") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), time(0.05, 3.0);
  for (int k = 0; k < 100; ++k) {
    KernelBoundQuery q;
    q.x1 = pos(rng);
    q.x2 = pos(rng);
    q.y1 = pos(rng);
    q.y2 = pos(rng);
    q.s = time(rng);
    q.t = q.s + time(rng);
    const double heat = heat_kernel_2d(q.x1 - q.y1, q.x2 - q.y2, q.t - q.s);
    CHECK(gamma_lower_bound(q) == Approx(heat).epsilon(1e-12));
  }
}

TEST_CASE("bound decays with separation and drift") {
  for (double B : {0.0, 0.5, 1.0}) {
    double prev = kernel_bound_factor(0.0, 1.0, B);
    for (double d = 0.1; d < 6.0; d += 0.1) {
      const double v = kernel_bound_factor(d, 1.0, B);
      CHECK(v < prev);
      CHECK(kernel_bound_factor(-d, 1.0, B) == v);
      prev = v;
    }
  }
  for (double d : {0.0, 1.0, 3.0}) CHECK(kernel_bound_factor(d, 1.0, 1.0) < kernel_bound_factor(d, 1.0, 0.5));
  KernelBoundQuery bad;
  bad.t = bad.s = 1.0;
  CHECK_THROWS_AS(gamma_lower_bound(bad), DomainError);
  bad.t = 2.0;
  bad.B = -1.0;
  CHECK_THROWS_AS(gamma_lower_bound(bad), DomainError);
}

TEST_CASE("Harnack constant: monotone, scale invariant, attained on the arc") {
  double prev = 1.0;
  for (double C3 : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    const HarnackResult r = harnack_constant(C3);
    CHECK(r.a > 0.0);
    CHECK(r.a < prev);
    CHECK(r.diagnostic.empty());
    CHECK(std::hypot(r.d1, r.d2) == Approx(C3).epsilon(1e-6));
    prev = r.a;
    for (double v0 : {0.25, 0.5}) CHECK(harnack_constant(C3, v0).a == Approx(r.a).epsilon(1e-8));
  }
}

TEST_CASE("geometric series constant") {
  const double c2 = c2_series();
  CHECK(c2 > 1.5);
  CHECK(c2 <= 1.75);
  CHECK(c2_partial(0) == 1.0);
  CHECK(c2_partial(3) < c2);
}

TEST_CASE("bound holds against the solved kernel for all three drifts") {
  const auto battery = kernel_battery();
  REQUIRE(battery.size() == 3);
  const double a5 = harnack_constant(5.0).a;
  for (const KernelBattery& b : battery) {
    INFO(b.label);
    CHECK(b.checks.size() == 20);
    CHECK(b.passed());
    for (const KernelCheck& c : b.checks) {
      CHECK(c.pde_value >= c.bound - c.allowance);
      if (c.query.t == 1.0 && b.B <= 1.0) CHECK(c.pde_value >= a5 - c.allowance);
    }
    if (b.B == 0.0) {
      for (const KernelCheck& c : b.checks) CHECK(std::abs(c.pde_value - c.heat) <= c.allowance);
    }
  }
}

TEST_CASE("validation solver guards") {
  const Grid2D grid(48, 3.0);
  const FrozenDrift d = constant_drift(grid, 1.0, 0.3);
  FrozenDrift lying = d;
  lying.B = 0.5;
  CHECK_THROWS_AS(kernel_bound_vs_pde(lying, 0.0, 0.0, {{0.5, 0.5, 1.0}}), ConfigError);
  CHECK_THROWS_AS(kernel_bound_vs_pde(d, 0.0, 0.0, {{0.5, 0.5, 1.0}}, 0.5), ConfigError);
  CHECK(zero_drift(grid).B == 0.0);
}
