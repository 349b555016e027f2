#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fluxchemo/config.hpp"
#include "fluxchemo/cutoff.hpp"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/initial.hpp"
#include "fluxchemo/params.hpp"
#include "fluxchemo/pde2d.hpp"

using namespace fluxchemo;
using doctest::Approx;

namespace {

Params reference() { return Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 12.0); }

}  // namespace

TEST_CASE("rescale with unit scales is the identity") {
  PhysicalParams pp;
  pp.chi = 128.0;
  pp.v0 = 0.5;
  pp.beta = 0.5 / 128.0;
  pp.delta = pp.beta / 10.0;
  pp.eps = 0.05;
  pp.theta = 0.25;
  pp.M0 = 200.0;
  pp.L = 12.0;
  const Params p = rescale(pp);
  CHECK(p.chi == pp.chi);
  CHECK(p.v0 == pp.v0);
  CHECK(p.eps == pp.eps);
  CHECK(p.M0 == pp.M0);
  CHECK(p.L == pp.L);
  CHECK(p.sigma == pp.sigma);
  CHECK(p.theta == pp.theta);
  CHECK(p.beta == pp.beta);
  CHECK(p.delta == pp.delta);
}

TEST_CASE("rescale applies the stated ratios") {
  PhysicalParams pp;
  pp.kappa = 4.0;
  pp.chi = 2.0;
  pp.v0 = 0.3;
  pp.beta = pp.v0 / pp.chi;
  pp.delta = pp.beta / 10.0;
  CHECK(rescale(pp, RegimeCheck::skip).chi == Approx(0.5).epsilon(1e-15));

  PhysicalParams q;
  q.v0 = 0.3;
  q.l = 2.0;
  q.chi = 1.0;
  q.beta = 0.3;
  q.delta = 0.03;
  CHECK(rescale(q, RegimeCheck::skip).v0 == Approx(0.6).epsilon(1e-15));
}

TEST_CASE("derived gamma, R0 and r0") {
  const Params p = Params::make(8.0, 1.0, 0.1, 1.0, 0.5, 200.0, 10.0);
  CHECK(p.gamma == 16.0);
  CHECK(p.R0 == 7.0);
  // mpmath: 1/16 + 1/sqrt(2)
  CHECK(p.r0 == Approx(0.76960678118654752).epsilon(1e-15));
  CHECK(p.beta == Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK(p.delta == Approx(p.beta / 10.0).epsilon(1e-15));
  CHECK(p.r0 > 1.0 / std::numbers::sqrt2);
  CHECK(p.r0 <= 0.8);
}

TEST_CASE("regime gate rejects each violated assumption") {
  CHECK_THROWS_AS(Params::from_gamma(32.0, 1.5, 0.05, 0.25, 1.0, 200.0, 12.0), RegimeError);
  CHECK_THROWS_AS(Params::from_gamma(8.0, 0.5, 0.05, 0.25, 1.0, 200.0, 12.0), RegimeError);
  CHECK_THROWS_AS(Params::from_gamma(32.0, 0.5, 0.05, 1.0, 1.0, 200.0, 12.0), RegimeError);
  CHECK_NOTHROW(Params::from_gamma(32.0, 0.5, 0.05, 1.0, 1.0, 200.0, 12.0, RegimeCheck::skip));
  const Params bad = Params::from_gamma(32.0, 0.5, 0.05, 1.0, 1.0, 200.0, 12.0, RegimeCheck::skip);
  CHECK(regime_violation(bad).find("40*pi*theta") != std::string::npos);
  CHECK(regime_violation(reference()).empty());
  CHECK_THROWS_AS(Params::make(-1.0, 0.5, 0.05, 0.25, 1.0, 200.0, 12.0), ConfigError);
}

TEST_CASE("L-regime classification") {
  CHECK(classify(Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 2.0)) == LRegime::near);
  CHECK(classify(reference()) == LRegime::intermediate);
  CHECK(classify(Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 31.0)) ==
        LRegime::intermediate);
  CHECK(classify(Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, 40.0)) == LRegime::far);
}

TEST_CASE("cutoff values") {
  const Params p = reference();
  const Cutoff psi(p);
  CHECK(psi(0.0) == 0.0);
  CHECK(psi(2.0 * p.beta) == p.v0);
  CHECK(psi(p.beta - p.delta) == Approx(p.chi * (p.beta - p.delta)).epsilon(1e-14));
  const double mid = p.beta - p.delta / 2.0;
  CHECK(psi(mid) >= p.chi * mid);
  CHECK(psi(mid) <= p.v0);
  CHECK(Cutoff::none()(1.0) == 0.0);
}

TEST_CASE("cutoff is monotone and the bridge dominates the linear branch") {
  const Params p = reference();
  const Cutoff psi(p);
  double prev = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double z = 2.0 * p.beta * k / 20000.0;
    const double v = psi(z);
    CHECK(v >= prev);
    prev = v;
  }
  for (int k = 1; k < 1000; ++k) {
    const double z = p.beta - p.delta + p.delta * k / 1000.0;
    CHECK(psi.connector(z) >= p.chi * z * (1.0 - 1e-14));
  }
}

TEST_CASE("initial attractant mass sits in the stated window") {
  const Params p = Params::from_gamma(32.0, 0.5, 0.05, 1.0, 1.0, 200.0, 12.0, RegimeCheck::skip);
  const InitialData init = make_initial(p, Rho1Kind::radial_ring, default_grid(p));
  const double m2 = init.rho2.integral();
  CHECK(m2 >= 7.0 * std::numbers::pi / 4.0);
  CHECK(m2 <= 2.0 * std::numbers::pi);
}

TEST_CASE("zero mass gives an empty rho1") {
  const Params p = Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 0.0, 12.0, RegimeCheck::skip);
  const InitialData init = make_initial(p, Rho1Kind::radial_ring, default_grid(p));
  CHECK(init.rho1.max() == 0.0);
}

TEST_CASE("ring and bump satisfy the rho1 mass constraints") {
  const Params p = Params::make(16.0, 1.0, 0.05, 1.0, 1.0, 100.0, 10.0, std::nullopt, 0.05,
                                RegimeCheck::skip);
  const Grid2D grid = default_grid(p);
  for (Rho1Kind kind : {Rho1Kind::radial_ring, Rho1Kind::offset_bump}) {
    const InitialData init = make_initial(p, kind, grid, 0.7);
    CHECK(local_mass(init.rho1, p.L) == Approx(p.M0).epsilon(1e-3));
    CHECK(local_mass(init.rho1, p.L / 2.0) <= 0.01 * p.M0);
    CHECK(init.rho1.min() >= 0.0);
  }
  const InitialData ring = make_initial(p, Rho1Kind::radial_ring, grid);
  CHECK(local_mass(ring.rho1, 5.0) <= 1.0);
  const InitialData bump = make_initial(p, Rho1Kind::offset_bump, grid);
  const int c = grid.n / 2;
  const int right = static_cast<int>((7.5 + grid.half_width) / grid.h());
  const int left = static_cast<int>((-7.5 + grid.half_width) / grid.h());
  // Not radial: the bump sits on the +x axis only.
  CHECK(bump.rho1(right, c) > 0.0);
  CHECK(bump.rho1(left, c) == 0.0);
}

TEST_CASE("initial data rejects coarse or small grids") {
  const Params p = reference();
  CHECK_THROWS_AS(make_initial(p, Rho1Kind::radial_ring, Grid2D(64, default_half_width(p))),
                  ResolutionError);
  CHECK_THROWS_AS(make_initial(p, Rho1Kind::radial_ring, Grid2D(256, 15.0)), ConfigError);
  CHECK(default_half_width(p) >= p.L + 5.0 / p.v0);
  CHECK(default_half_width(p) >= 2.0 * p.L);
  CHECK(default_half_width(p) >= 8.0 / p.v0);
}

TEST_CASE("config parsing") {
  const ConfigMap m = parse_config("# comment\n  gamma = 32  # trailing\nv0=0.5\n\ntheta = 0.25\n"
                                   "M0 = 200\neps = 0.05\nL = 12\n");
  CHECK(m.size() == 6);
  CHECK(m.at("gamma") == "32");
  const Params p = params_from_config(m);
  CHECK(p.gamma == 32.0);
  CHECK(p.R0 == 31.0);
  CHECK_THROWS_AS(parse_config("gamma 32\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(params_from_config(parse_config("gamma = 32\nchi = 128\ntheta = 0.25\n")),
                  ConfigError);
  CHECK_THROWS_AS(params_from_config(parse_config("gamma = x\ntheta = 1\n")), ConfigError);
  ConfigMap extra = m;
  extra["bogus"] = "1";
  CHECK_THROWS_AS(params_from_config(extra), ConfigError);
  CHECK_NOTHROW(params_from_config(extra, {"bogus"}));
  ConfigMap outside = m;
  outside["theta"] = "1";
  CHECK_THROWS_AS(params_from_config(outside), RegimeError);
  outside["regime"] = "skip";
  CHECK_NOTHROW(params_from_config(outside));
}

TEST_CASE("physical config goes through the rescaling") {
  const ConfigMap m = parse_config(
      "units = physical\nkappa = 2\nchi = 256\nv0 = 1\neps = 0.1\ntheta = 0.25\nl = 1\n"
      "L = 12\nM0 = 200\n");
  const Params p = params_from_config(m);
  CHECK(p.chi == Approx(128.0).epsilon(1e-15));
  CHECK(p.v0 == Approx(0.5).epsilon(1e-15));
  CHECK(p.eps == Approx(0.05).epsilon(1e-15));
  CHECK(p.gamma == Approx(32.0).epsilon(1e-15));
}

TEST_CASE("config round trip keeps parameters and regime labels") {
  for (double L : {1.5, 2.0, 12.0, 31.0, 31.5, 140.0}) {
    for (double gamma : {16.0, 32.0, 64.0}) {
      const Params p = Params::from_gamma(gamma, 0.5, 0.05, 0.25, 1.0, 200.0, L);
      const Params q = params_from_config(parse_config(params_to_config(p)));
      CHECK(q.chi == p.chi);
      CHECK(q.v0 == p.v0);
      CHECK(q.L == p.L);
      CHECK(q.delta == p.delta);
      CHECK(q.gamma == Approx(p.gamma).epsilon(1e-15));
      CHECK(classify(q) == classify(p));
    }
  }
}
