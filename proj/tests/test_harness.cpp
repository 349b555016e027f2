#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fluxchemo/config.hpp"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/harness.hpp"

using namespace fluxchemo;
using doctest::Approx;

namespace {

Params base(double L = 35.0) { return Params::from_gamma(32.0, 0.5, 0.05, 0.25, 1.0, 200.0, L); }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

PointResult synthetic(std::size_t index, double L, double factor) {
  PointResult r;
  r.index = index;
  r.params = base(L);
  r.regime = classify(r.params);
  r.bound = bound_terms(r.params);
  r.tau = factor * r.bound.total();
  return r;
}

}  // namespace

TEST_CASE("bound terms per regime") {
  const double reaction = 1.0 / (0.05 * 0.25 * 200.0);
  const BoundTerms near = bound_terms(base(1.5));
  CHECK(near.transport == 0.0);
  CHECK(near.equilibration == Approx(4.0).epsilon(1e-15));
  CHECK(near.reaction == Approx(reaction).epsilon(1e-15));
  const BoundTerms mid = bound_terms(base(12.0));
  CHECK(mid.transport == Approx(24.0).epsilon(1e-15));
  CHECK(mid.equilibration == 0.0);
  const BoundTerms far = bound_terms(base(64.0));
  CHECK(far.transport == Approx(128.0).epsilon(1e-15));
  CHECK(far.equilibration == Approx(128.0).epsilon(1e-15));
  CHECK(far.total() == Approx(256.0 + reaction).epsilon(1e-15));
}

TEST_CASE("scaling fit on synthetic data recovers C = 1") {
  std::vector<PointResult> pts;
  for (double L : {35.0, 50.0, 70.0, 100.0, 140.0}) pts.push_back(synthetic(pts.size(), L, 1.0));
  const ScalingFit fit = fit_scaling(pts, LRegime::far);
  CHECK(fit.C == Approx(1.0).epsilon(1e-15));
  CHECK(fit.rows.size() == 5);
  for (const ScalingRow& r : fit.rows) CHECK(std::abs(r.residual) <= 1e-12 * r.tau);
  CHECK(std::isfinite(fit.slope));

  pts[2].tau *= 1.5;
  const ScalingFit up = fit_scaling(pts, LRegime::far);
  CHECK(up.C == Approx(1.5).epsilon(1e-15));
  for (const ScalingRow& r : up.rows) CHECK(r.residual >= -1e-12 * r.tau);

  CHECK_THROWS_AS(fit_scaling(pts, LRegime::near), ConfigError);
  for (PointResult& p : pts) p.tau_censored = true;
  CHECK_THROWS_AS(fit_scaling(pts, LRegime::far), ConfigError);
}

TEST_CASE("offset slope") {
  const std::vector<double> L{10.0, 20.0, 40.0};
  const std::vector<double> tau{3.0 + 100.0, 3.0 + 400.0, 3.0 + 1600.0};
  CHECK(offset_slope(L, tau, 3.0) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(offset_slope(L, tau, 200.0), DomainError);
  CHECK_THROWS_AS(offset_slope({1.0}, {2.0}, 0.0), DomainError);
}

TEST_CASE("risky reaction report") {
  CHECK(risky_reaction_report({}).empty());
  PointResult r = synthetic(0, 12.0, 1.0);
  r.tau_D = 10.0 * r.tau;
  const auto rows = risky_reaction_report({r});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ratio == Approx(10.0).epsilon(1e-15));
  CHECK_FALSE(rows[0].risky);
  CHECK(rows[0].M0_eps == Approx(10.0).epsilon(1e-15));
}

TEST_CASE("sweep config parsing and point expansion") {
  const ConfigMap m = parse_config(
      "gamma = 32\nv0 = 0.5\ntheta = 0.25\nM0 = 200\neps = 0.05\nL = 12\n"
      "sweep.L = 31, 35\nsweep.gamma = 32, 64\nbaseline = 0\nresolution = 0.125\n");
  const SweepSpec s = sweep_spec_from_config(m);
  CHECK_FALSE(s.baseline);
  CHECK(s.resolution == 0.125);
  const auto pts = s.points();
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].gamma == 32.0);
  CHECK(pts[1].gamma == 64.0);
  CHECK(pts[2].L == 35.0);
  CHECK(pts[1].delta / pts[1].beta == Approx(s.base.delta / s.base.beta).epsilon(1e-14));

  ConfigMap seeds = m;
  seeds["seeds"] = "1, 2";
  CHECK_THROWS_AS(sweep_spec_from_config(seeds), ConfigError);
  seeds["backend"] = "planar";
  CHECK(sweep_spec_from_config(seeds).points().size() == 8);
  ConfigMap bad = m;
  bad["sweep.v0"] = "2";
  CHECK_THROWS_AS(sweep_spec_from_config(bad), RegimeError);
  bad = m;
  bad["workers"] = "0";
  CHECK_THROWS_AS(sweep_spec_from_config(bad), ConfigError);
  bad = m;
  bad["sweep.L"] = "31, x";
  CHECK_THROWS_AS(sweep_spec_from_config(bad), ConfigError);
}

TEST_CASE("seed angles are deterministic and in range") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const double a = seed_angle(s);
    CHECK(a >= 0.0);
    CHECK(a < 2.0 * 3.141592653589793);
    CHECK(a == seed_angle(s));
  }
  CHECK(seed_angle(1) != seed_angle(2));
}

TEST_CASE("censored points report the horizon and skip the baseline") {
  SweepSpec s;
  s.base = base(12.0);
  s.resolution = 0.125;
  s.T_max = 1.0;
  const SweepResult r = run_sweep(s);
  REQUIRE(r.points.size() == 1);
  const PointResult& p = r.points[0];
  CHECK(p.ok());
  CHECK(p.tau_censored);
  CHECK(p.tau == 1.0);
  CHECK_FALSE(p.has_baseline());
}

TEST_CASE("L sweep: nondecreasing half-time, identical output for any worker count") {
  SweepSpec s;
  s.base = base();
  s.axes = {{"L", {33.0, 35.0, 39.0}}};
  s.resolution = 0.125;
  s.baseline = false;
  s.workers = 1;
  const SweepResult one = run_sweep(s);
  s.workers = 3;
  const SweepResult three = run_sweep(s);
  write_sweep_csv("/tmp/fluxchemo_sweep_w1.csv", one);
  write_sweep_csv("/tmp/fluxchemo_sweep_w3.csv", three);
  CHECK(slurp("/tmp/fluxchemo_sweep_w1.csv") == slurp("/tmp/fluxchemo_sweep_w3.csv"));
  REQUIRE(one.points.size() == 3);
  for (const PointResult& p : one.points) CHECK_FALSE(p.tau_censored);
  CHECK(one.points[1].tau >= one.points[0].tau);
  CHECK(one.points[2].tau >= one.points[1].tau);

  const SweepResult back = read_sweep_csv("/tmp/fluxchemo_sweep_w1.csv");
  REQUIRE(back.points.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.points[k].tau == one.points[k].tau);
    CHECK(back.points[k].params.L == one.points[k].params.L);
    CHECK(back.points[k].regime == one.points[k].regime);
  }
}

TEST_CASE("gamma sweep at large L: half-time nonincreasing") {
  SweepSpec s;
  s.base = base(70.0);
  s.axes = {{"gamma", {16.0, 32.0, 64.0}}};
  s.resolution = 0.125;
  s.baseline = false;
  const SweepResult r = run_sweep(s);
  REQUIRE(r.points.size() == 3);
  for (const PointResult& p : r.points) CHECK(p.ok());
  CHECK(r.points[1].tau <= r.points[0].tau);
  CHECK(r.points[2].tau <= r.points[1].tau);
}
