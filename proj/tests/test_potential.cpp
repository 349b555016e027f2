#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/params.hpp"
#include "fluxchemo/potential.hpp"

using namespace fluxchemo;
using doctest::Approx;

namespace {

Params p16() { return Params::from_gamma(16.0, 1.0, 0.05, 0.25, 1.0, 200.0, 10.0); }

}  // namespace

TEST_CASE("dH branch values") {
  const PotentialH pot = build_potential(p16());
  CHECK(pot.R0() == 7.0);
  CHECK(pot.dH(0.5) == 1.0);
  CHECK(pot.dH(0.0) == 1.0);
  CHECK(pot.dH(3.0) == -1.0);
  CHECK(pot.dH(10.0) == Approx(-16.0 / 40.0).epsilon(1e-15));
  CHECK(pot.H(7.0) == Approx(-4.0 * std::log(7.0)).epsilon(1e-14));
  CHECK(pot.H(20.0) == Approx(-4.0 * std::log(20.0)).epsilon(1e-14));
}

TEST_CASE("H and dH are continuous across the branch points") {
  for (double gamma : {16.0, 32.0, 64.0}) {
    for (double v0 : {0.25, 0.5, 1.0}) {
      const PotentialH pot = build_potential(Params::from_gamma(gamma, v0, 0.05, 0.25, 1.0,
                                                                1000.0, 10.0));
      for (double b : {pot.r0(), 1.0, pot.R0() - 1.0, pot.R0()}) {
        const double e = 1e-9;
        CHECK(std::abs(pot.dH(b + e) - pot.dH(b - e)) <= 1e-7);
        const double jump = pot.H(b + e) - pot.H(b - e) - e * (pot.dH(b + e) + pot.dH(b - e));
        CHECK(std::abs(jump) <= 1e-10 * (1.0 + std::abs(pot.H(b))));
      }
    }
  }
}

TEST_CASE("H is an antiderivative of dH") {
  const PotentialH pot = build_potential(Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 12.0));
  for (double r = 0.05; r < 80.0; r *= 1.17) {
    const double h = 1e-5 * std::max(r, 1.0);
    const double fd = (pot.H(r + h) - pot.H(r - h)) / (2.0 * h);
    CHECK(fd == Approx(pot.dH(r)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("dH stays between -v0 and v0 inside R0 and is bounded by the far-field slope") {
  const Params p = Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 12.0);
  const PotentialH pot = build_potential(p);
  for (double r = 0.0; r <= pot.R0(); r += 0.01) {
    CHECK(pot.dH(r) <= p.v0 + 1e-15);
    CHECK(pot.dH(r) >= -p.v0 - 1e-15);
  }
  // Nonincreasing on [r0, R0 - 1].
  double prev = pot.dH(pot.r0());
  for (double r = pot.r0(); r <= pot.R0() - 1.0; r += 0.005) {
    CHECK(pot.dH(r) <= prev + 1e-15);
    prev = pot.dH(r);
  }
}

TEST_CASE("R0 is affine in gamma and r0 in its window") {
  for (double v0 : {0.25, 0.5, 1.0}) {
    CHECK(derived_R0(64.0, v0) + 1.0 == Approx(2.0 * (derived_R0(32.0, v0) + 1.0)).epsilon(1e-15));
    for (double gamma : {16.0, 32.0, 100.0}) {
      const double r0 = derived_r0(gamma, v0);
      CHECK(r0 > 1.0 / std::numbers::sqrt2);
      CHECK(r0 < 1.0);
    }
  }
}

TEST_CASE("potential construction guards") {
  CHECK_THROWS_AS(build_potential(Params::from_gamma(4.0, 1.0, 0.05, 0.25, 1.0, 200.0, 10.0,
                                                     RegimeCheck::skip)),
                  RegimeError);
  const PotentialH flat = PotentialH::flat();
  CHECK(flat.is_flat());
  CHECK(flat.dH(3.0) == 0.0);
  CHECK(flat.H(3.0) == 0.0);
}

TEST_CASE("family members are admissible") {
  const double theta = 0.25;
  const DensityFamilySpec fam{theta};
  const Grid2D grid = family_grid(64);
  const auto set = domination_test_set(theta, grid, 10, 99);
  CHECK(set.size() == 21);
  for (const Field2D& g : set) CHECK(family_violation(g, fam).empty());
  CHECK(full_ball_density(theta, grid).integral() ==
        Approx(2.0 * std::numbers::pi * theta).epsilon(1e-12));
  CHECK(case2_extremal_density(theta, 0.9, grid).integral() ==
        Approx(std::numbers::pi * theta).epsilon(1e-12));
  Field2D over = full_ball_density(theta, grid);
  over(32, 32) = 3.0 * theta;
  CHECK_FALSE(family_violation(over, fam).empty());
  const auto a = random_family_members(theta, grid, 3, 5);
  const auto b = random_family_members(theta, grid, 3, 5);
  for (std::size_t k = 0; k < 3; ++k) CHECK(a[k].data == b[k].data);
}

TEST_CASE("domination for radial members and the empty sample set") {
  const Params p = Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 12.0);
  const PotentialH pot = build_potential(p);
  const Grid2D grid = family_grid(64);
  const std::vector<Field2D> ball{full_ball_density(p.theta, grid)};
  const DominationReport far = verify_domination(pot, p, ball, {2.0 * p.R0, 3.0 * p.R0});
  CHECK(far.passed());
  const DominationReport all =
      verify_domination(pot, p, ball, log_radius_grid(1.001 * p.r0, 4.0 * p.R0, 40), 256,
                        1e-6 * p.v0);
  CHECK(all.passed());
  const DominationReport empty = verify_domination(pot, p, {}, {2.0, 5.0});
  CHECK(empty.passed());
  CHECK(empty.rows.empty());
  CHECK_THROWS(verify_domination(pot, p, ball, {0.5 * p.r0}));
}

TEST_CASE("case-2 extremal set against the potential at r = 0.9") {
  const Params p = p16();
  const PotentialH pot = build_potential(p);
  const std::vector<Field2D> g{case2_extremal_density(p.theta, 0.9, family_grid(64))};
  const DominationReport rep = verify_domination(pot, p, g, {0.9}, 256, 1e-6 * p.v0);
  CHECK(rep.passed());
}

TEST_CASE("log radius grid") {
  const auto r = log_radius_grid(1.0, 100.0, 3);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Approx(1.0));
  CHECK(r[1] == Approx(10.0));
  CHECK(r[2] == Approx(100.0));
}
