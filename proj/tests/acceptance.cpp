// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the set of failing criteria equals --expect-fail
// (default empty), so a known failure stays visible in the output while an
// unexpected pass or fail breaks the build.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fluxchemo/chemo.hpp"
#include "fluxchemo/harness.hpp"
#include "fluxchemo/initial.hpp"
#include "fluxchemo/kernel.hpp"
#include "fluxchemo/params.hpp"
#include "fluxchemo/pde2d.hpp"
#include "fluxchemo/potential.hpp"
#include "fluxchemo/radialfp.hpp"

using namespace fluxchemo;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Params reference(double L = 12.0, double eps = 0.05, double gamma = 32.0) {
  return Params::from_gamma(gamma, 0.5, eps, 0.25, 1.0, 200.0, L);
}

Outcome closed_form_constants() {
  const double r0_16 = 0.7696067811865475;  // mpmath: 1/16 + 1/sqrt2
  bool ok = derived_R0(16.0, 1.0) == 7.0 && derived_R0(32.0, 0.5) == 31.0 &&
            std::abs(derived_r0(16.0, 1.0) - r0_16) <= 1e-15 &&
            std::abs(derived_r0(32.0, 0.5) - (0.5 / 32.0 + 1.0 / std::numbers::sqrt2)) <= 1e-15;
  const double b16 = boundary_lower_bound(16.0);
  ok = ok && std::abs(b16 - 5.0 / 9.0) <= 1e-15 && b16 > 0.5;
  return {ok, fmt("R0(16,1) = %g, r0(16,1) = %.16g, boundary bound(16) = %.16g", derived_R0(16.0, 1.0),
                  derived_r0(16.0, 1.0), b16)};
}

Outcome c2_constant() {
  const double c2 = c2_series();
  return {c2 > 1.5 && c2 <= 1.75, fmt("C2 = %.13g", c2)};
}

Outcome kernel_bound() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), span(0.05, 3.0);
  double worst_rel = 0.0;
  for (int k = 0; k < 100; ++k) {
    KernelBoundQuery q;
    q.x1 = pos(rng);
    q.x2 = pos(rng);
    q.y1 = pos(rng);
    q.y2 = pos(rng);
    q.s = span(rng);
    q.t = q.s + span(rng);
    const double heat = heat_kernel_2d(q.x1 - q.y1, q.x2 - q.y2, q.t - q.s);
    worst_rel = std::max(worst_rel, std::abs(gamma_lower_bound(q) - heat) / heat);
  }
  bool ok = worst_rel <= 1e-12;
  std::ostringstream os;
  os << fmt("B = 0 worst relative gap %.2g", worst_rel);
  for (const KernelBattery& b : kernel_battery(20)) {
    std::size_t passed = 0;
    for (const KernelCheck& c : b.checks) passed += c.passed();
    ok = ok && b.passed() && b.checks.size() == 20;
    os << fmt("; %s %zu/%zu", b.label.c_str(), passed, b.checks.size());
  }
  return {ok, os.str()};
}

Outcome duality() {
  const auto rows = duality_experiment(reference(), {1, 2});
  bool ok = rows.size() == 4;
  std::ostringstream os;
  double drift = 0.0;
  for (std::size_t k = 0; ok && k < 2; ++k) {
    const DualityRow& coarse = rows[k];
    const DualityRow& fine = rows[k + 2];
    ok = ok && coarse.discrepancy <= 1e-2 && fine.discrepancy <= 0.5 * coarse.discrepancy;
    os << fmt("t = %.4g: %.3g -> %.3g; ", coarse.t, coarse.discrepancy, fine.discrepancy);
  }
  for (const DualityRow& r : rows) drift = std::max(drift, r.invariant_drift);
  ok = ok && drift <= 1e-3;
  os << fmt("invariant drift %.2g", drift);
  return {ok, os.str()};
}

Outcome barriers() {
  const Params p = reference();
  const BarrierReport s1 = barrier_experiment(p, 1, 10);
  const BarrierReport s2 = barrier_experiment(p, 2, 10);
  const bool ok = s1.passed() && s2.passed() && s1.rows.size() == 11 && s2.rows.size() >= 10;
  return {ok, fmt("stage 1 worst margin %.4g over %zu times; stage 2 worst margin %.4g over %zu times",
                  s1.worst_margin, s1.rows.size(), s2.worst_margin, s2.rows.size())};
}

// Planar reference run shared by criteria 6 and 8.
struct ReferenceRun {
  Params p;
  Diagnostics diag;
  double tau = 0.0;
};

const ReferenceRun& reference_run() {
  static const ReferenceRun run_data = [] {
    ReferenceRun r;
    r.p = reference();
    PlanarSimulation sim(r.p, make_initial(r.p, Rho1Kind::radial_ring, default_grid(r.p)));
    RunConfig cfg;
    cfg.T_max = 1e4;
    cfg.probes = {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0};
    r.diag = run(sim, cfg, stop_at_half_mass(r.p.theta));
    r.tau = half_time(r.diag, r.p.theta);
    return r;
  }();
  return run_data;
}

Outcome comparison() {
  const ReferenceRun& r = reference_run();
  if (!std::isfinite(r.tau)) return {false, "half-time not reached"};
  const PotentialH pot = build_potential(r.p);
  const RadialGrid grid = RadialGrid::reference(pot);
  auto u0 = cell_average(grid, [&](double s) { return ring_shape(s, r.p.L); });
  const double raw = cumulative_mass(grid, u0).back();
  for (double& v : u0) v *= r.p.M0 / raw;
  const RadialTrajectory Mu = solve_Mu(pot, grid, cumulative_mass(grid, u0), r.diag.times);
  const ComparisonReport rep = comparison_check(r.diag, Mu, r.p.theta, r.p.M0, r.diag.times.back());
  return {rep.passed(),
          fmt("tau = %.6g, %zu checks, worst margin %.4g at r = %g, t = %.4g (allowance %.4g); C1 = %g",
              r.tau, rep.checked, rep.worst_margin, rep.worst_r, rep.worst_t, rep.allowance,
              fit_C1(Mu, r.p))};
}

Outcome domination() {
  const Params p = reference();
  const PotentialH pot = build_potential(p);
  const std::vector<Field2D> samples = domination_test_set(p.theta, family_grid(64), 50);
  const std::vector<double> rs = log_radius_grid(p.r0 * 1.0011, 4.0 * p.R0, 60);
  const DominationReport rep = verify_domination(pot, p, samples, rs, 256, 1e-6 * p.v0);
  const ExtremalComparison ext = compare_extremal(DensityFamilySpec{p.theta}, p.sigma);
  return {rep.passed() && ext.worst_gap <= 0.01,
          fmt("%zu samples x %zu radii: %zu violations, worst margin %.4g; extremal gap %.3g",
              samples.size(), rs.size(), rep.violations, rep.worst_margin, ext.worst_gap)};
}

Outcome conservation() {
  const ReferenceRun& r = reference_run();
  const Diagnostics& d = r.diag;
  if (!std::isfinite(r.tau)) return {false, "half-time not reached"};
  std::size_t k = 1;
  while (k + 1 < d.size() && d.times[k] < r.tau) ++k;
  const double w = (r.tau - d.times[k - 1]) / (d.times[k] - d.times[k - 1]);
  const double cum = (1.0 - w) * d.cumulative_h[k - 1] + w * d.cumulative_h[k];
  const double level = kPi * r.p.theta;
  const bool ok = d.conservation_failures == 0 && cum <= level * (1.0 + 1e-9);
  return {ok, fmt("%zu steps, %zu conservation failures, worst |dm1 - dm2| %.2g; int h through tau %.8g "
                  "vs pi theta %.8g",
                  d.steps, d.conservation_failures, d.worst_step_mismatch, cum, level)};
}

Outcome scaling_law() {
  const Params base = reference(35.0);
  SweepSpec L_sweep;
  L_sweep.base = base;
  L_sweep.axes = {{"L", {base.R0, base.R0 + 4.0, 2.0 * (base.R0 + 4.0), 4.0 * (base.R0 + 4.0)}}};
  L_sweep.baseline = false;
  L_sweep.T_max = 1e5;
  const SweepResult lr = run_sweep(L_sweep);
  std::vector<double> L, tau;
  for (std::size_t k = 1; k < lr.points.size(); ++k) {
    if (!lr.points[k].ok() || lr.points[k].tau_censored) return {false, "L sweep point failed"};
    L.push_back(lr.points[k].params.L);
    tau.push_back(lr.points[k].tau);
  }
  const double offset = lr.points[0].tau;
  const double slope = offset_slope(L, tau, offset);
  const ScalingFit fit = fit_scaling({lr.points.begin() + 1, lr.points.end()}, LRegime::far, 3);
  double C_spread = 1.0;
  for (std::size_t k = 1; k < fit.rows.size(); ++k) {
    const double q = fit.rows[k].ratio / fit.rows[k - 1].ratio;
    C_spread = std::max(C_spread, std::max(q, 1.0 / q));
  }

  SweepSpec g_sweep;
  g_sweep.base = reference(4.0 * (base.R0 + 4.0));
  g_sweep.axes = {{"gamma", {16.0, 32.0, 64.0}}};
  g_sweep.baseline = false;
  const SweepResult gr = run_sweep(g_sweep);
  bool g_ok = gr.points.size() == 3;
  for (std::size_t k = 0; g_ok && k < 3; ++k) g_ok = gr.points[k].ok() && !gr.points[k].tau_censored;
  g_ok = g_ok && gr.points[1].tau <= gr.points[0].tau && gr.points[2].tau <= gr.points[1].tau;

  const bool ok = slope >= 1.5 && slope <= 2.5 && C_spread <= 2.0 && g_ok;
  return {ok, fmt("tau(L = %g, %g, %g, %g) = %.4g, %.4g, %.4g, %.4g; slope of tau - tau(R0) = %.3f "
                  "(target [1.5, 2.5]); C ratio spread %.3f; tau(gamma = 16, 32, 64) = %.4g, %.4g, %.4g",
                  lr.points[0].params.L, L[0], L[1], L[2], offset, tau[0], tau[1], tau[2], slope, C_spread,
                  gr.points[0].tau, gr.points[1].tau, gr.points[2].tau)};
}

Outcome enhancement() {
  const Params p = reference(12.0, 0.001);
  const HalfTime chemo = measure_half_time(p, Backend::radial, 1.0 / 16.0, 1e5, true);
  if (chemo.censored) return {false, "chemotactic run censored"};
  const double horizon = 50.0 * chemo.tau;
  const HalfTime base = measure_half_time(p, Backend::radial, 1.0 / 16.0, horizon, false);
  const double ratio = base.tau / chemo.tau;
  return {ratio >= 5.0, fmt("M0 eps = %g: tau = %.6g, tau_D %s %.6g, ratio %s %.4g", p.M0 * p.eps, chemo.tau,
                            base.censored ? ">=" : "=", base.tau, base.censored ? ">=" : "=", ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expect_fail;
  std::vector<int> only;
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail")->delimiter(',');
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form constants", closed_form_constants},
      {"C2 series", c2_constant},
      {"kernel lower bound", kernel_bound},
      {"duality", duality},
      {"barrier stages", barriers},
      {"comparison inequality", comparison},
      {"potential domination", domination},
      {"conservation", conservation},
      {"scaling law", scaling_law},
      {"chemotaxis enhancement", enhancement},
  };
  const std::set<int> selected(only.begin(), only.end());
  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) failed.insert(id);
    std::printf("criterion %2d %-24s %s (%.1fs): %s\n", id, criteria[i].first, out.pass ? "PASS" : "FAIL",
                secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::set<int> expected;
  for (int id : expect_fail) {
    if (selected.empty() || selected.count(id)) expected.insert(id);
  }
  if (failed != expected) {
    std::printf("failing criteria differ from the expected set\n");
    return 1;
  }
  return 0;
}
