#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fluxchemo/chemo.hpp"
#include "fluxchemo/config.hpp"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/harness.hpp"
#include "fluxchemo/initial.hpp"
#include "fluxchemo/kernel.hpp"
#include "fluxchemo/pde2d.hpp"
#include "fluxchemo/potential.hpp"
#include "fluxchemo/radialfp.hpp"

namespace fs = std::filesystem;
using namespace fluxchemo;

namespace {

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

struct SimulateArgs {
  std::string params;
  std::string backend = "planar";
  int grid = 0;
  double tmax = 1e4;
  std::string out = "out";
  std::string rho1 = "radial-ring";
  double bump_angle = 0.0;
  bool baseline = false;
  bool no_stop = false;
  bool snapshot = false;
  std::vector<double> probes;
};

int simulate(const SimulateArgs& a) {
  const Params p = params_from_config(read_config(a.params));
  fs::create_directories(a.out);
  RunConfig cfg;
  cfg.T_max = a.tmax;
  cfg.probes = a.probes.empty() ? std::vector<double>{1.0, 2.0 / p.v0, 0.5 * p.L, p.L} : a.probes;
  cfg.dump_dir = a.out;
  const StopPredicate stop = a.no_stop ? StopPredicate{} : stop_at_half_mass(p.theta);
  const double hw = default_half_width(p);

  Diagnostics d;
  if (a.backend == "radial") {
    if (a.rho1 != "radial-ring") throw ConfigError("the radial backend runs the radial ring only");
    const double dr = a.grid > 0 ? hw / a.grid : 1.0 / 16.0;
    RadialSimulation sim(p, make_radial_initial(p, dr, hw), !a.baseline);
    d = run(sim, cfg, stop);
    if (a.snapshot) {
      write_profile((fs::path(a.out) / "rho1").string(), sim.rho1(), sim.time());
      write_profile((fs::path(a.out) / "rho2").string(), sim.rho2(), sim.time());
    }
  } else if (a.backend == "planar") {
    const Grid2D grid = a.grid > 0 ? Grid2D(a.grid, hw) : default_grid(p);
    PlanarOptions opt;
    opt.chemotaxis = !a.baseline;
    PlanarSimulation sim(p, make_initial(p, rho1_kind_from_string(a.rho1), grid, a.bump_angle),
                         opt);
    d = run(sim, cfg, stop);
    if (a.snapshot) {
      write_field((fs::path(a.out) / "rho1").string(), sim.state().rho1, sim.time());
      write_field((fs::path(a.out) / "rho2").string(), sim.state().rho2, sim.time());
    }
  } else {
    throw ConfigError("unknown backend '" + a.backend + "'");
  }
  write_diagnostics_csv((fs::path(a.out) / "diagnostics.csv").string(), d);

  const double tau = half_time(d, p.theta);
  std::printf("regime %s, R0 = %.6g, steps %zu\n", to_string(classify(p)), p.R0, d.steps);
  if (std::isinf(tau)) {
    std::printf("half-time not reached by t = %.6g (mass2 = %.6g > pi theta = %.6g)\n",
                d.times.empty() ? 0.0 : d.times.back(), d.mass2.empty() ? 0.0 : d.mass2.back(),
                std::numbers::pi * p.theta);
  } else {
    std::printf("tau = %.10g\n", tau);
  }
  std::printf("conservation: worst |dm1 - dm2| = %.3g, failing steps %zu\n",
              d.worst_step_mismatch, d.conservation_failures);
  return 0;
}

int verify_potential(const std::string& params, const std::string& out, int angles, int radii,
                     int family_n, int n_random, std::uint64_t seed) {
  const Params p = params_from_config(read_config(params));
  const PotentialH pot = build_potential(p);
  const Grid2D grid = family_grid(family_n);
  const std::vector<Field2D> samples = domination_test_set(p.theta, grid, n_random, seed);
  const std::vector<double> rs = log_radius_grid(p.r0 * 1.0011, 4.0 * p.R0, radii);
  const DominationReport rep = verify_domination(pot, p, samples, rs, angles, 1e-6 * p.v0);

  std::ofstream csv = open_out(out);
  csv << "r,g_id,lhs,rhs,margin\n";
  for (const DominationRow& row : rep.rows) {
    csv << row.r << "," << row.g_id << "," << row.lhs << "," << row.rhs << "," << row.margin
        << "\n";
  }
  std::printf("domination: %zu samples x %zu radii, %zu violations, worst margin %.6g: %s\n",
              samples.size(), rs.size(), rep.violations, rep.worst_margin,
              rep.passed() ? "PASS" : "FAIL");

  const ExtremalComparison ext = compare_extremal(DensityFamilySpec{p.theta}, p.sigma);
  std::printf("extremal closed form vs greedy oracle: worst gap %.3g of sup |closed form|: %s\n",
              ext.worst_gap, ext.worst_gap <= 0.01 ? "PASS" : "FAIL");
  return 0;
}

int verify_duality(const std::string& params, const std::string& out, int levels,
                   double t_end) {
  const Params p = params_from_config(read_config(params));
  std::vector<int> refine;
  for (int k = 0; k < levels; ++k) refine.push_back(1 << k);
  const std::vector<DualityRow> rows = duality_experiment(p, refine, t_end);
  std::ofstream csv = open_out(out);
  csv << "refine,n,dr,t,discrepancy,invariant_drift\n";
  for (const DualityRow& r : rows) {
    csv << r.refine << "," << r.n << "," << r.dr << "," << r.t << "," << r.discrepancy << ","
        << r.invariant_drift << "\n";
    std::printf("refine %d (n = %d) t = %.6g: discrepancy %.4g, invariant drift %.3g\n", r.refine,
                r.n, r.t, r.discrepancy, r.invariant_drift);
  }
  return 0;
}

int verify_barrier(const std::string& params, const std::string& out, int stage, int n_times) {
  const Params p = params_from_config(read_config(params));
  std::ofstream csv = open_out(out);
  csv << "stage,t,radius,f_min,margin,subsolution_margin,f_anchor\n";
  for (int s = 1; s <= 2; ++s) {
    if (stage != 0 && stage != s) continue;
    const BarrierReport rep = barrier_experiment(p, s, n_times);
    for (const BarrierRow& r : rep.rows) {
      csv << s << "," << r.t << "," << r.radius << "," << r.f_min << "," << r.margin << ","
          << r.subsolution_margin << "," << r.f_anchor << "\n";
    }
    std::printf("stage %d: %zu times, worst margin %.6g: %s\n", s, rep.rows.size(),
                rep.worst_margin, rep.passed() ? "PASS" : "FAIL");
  }
  return 0;
}

int kernel_bound(const std::string& out) {
  std::printf("C3      a(C3)\n");
  for (double c3 : {1.0, 2.0, 5.0, 10.0}) {
    const HarnackResult h = harnack_constant(c3);
    std::printf("%-6g  %.10g%s%s\n", c3, h.a, h.diagnostic.empty() ? "" : "  ",
                h.diagnostic.c_str());
  }
  std::printf("C2 = %.12g\n", c2_series());
  if (out.empty()) return 0;
  std::ofstream csv = open_out(out);
  csv << "drift,B,x1,x2,y1,y2,t,pde_value,bound,allowance,heat,passed\n";
  for (const KernelBattery& b : kernel_battery()) {
    std::size_t pass = 0;
    for (const KernelCheck& c : b.checks) {
      csv << b.label << "," << b.B << "," << c.query.x1 << "," << c.query.x2 << "," << c.y1
          << "," << c.y2 << "," << c.query.t << "," << c.pde_value << "," << c.bound << ","
          << c.allowance << "," << c.heat << "," << c.passed() << "\n";
      pass += c.passed();
    }
    std::printf("battery %-12s %zu/%zu queries hold\n", b.label.c_str(), pass, b.checks.size());
  }
  return 0;
}

int sweep(const std::string& spec_path, const std::string& out, int workers) {
  SweepSpec spec = sweep_spec_from_config(read_config(spec_path));
  if (workers > 0) spec.workers = workers;
  fs::create_directories(out);
  const SweepResult res = run_sweep(spec);
  write_sweep_csv((fs::path(out) / "sweep.csv").string(), res);
  std::size_t failed = 0;
  for (const PointResult& r : res.points) {
    if (!r.ok()) {
      ++failed;
      std::fprintf(stderr, "point %zu failed: %s\n", r.index, r.error.c_str());
    }
  }
  std::printf("%zu points, %zu failed; wrote %s\n", res.points.size(), failed,
              (fs::path(out) / "sweep.csv").string().c_str());
  return 0;
}

int fit_scaling_cmd(const std::string& in, std::size_t min_points) {
  const SweepResult res = read_sweep_csv((fs::path(in) / "sweep.csv").string());
  std::vector<ScalingFit> fits;
  for (LRegime r : {LRegime::near, LRegime::intermediate, LRegime::far}) {
    try {
      fits.push_back(fit_scaling(res.points, r, min_points));
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "regime %s skipped: %s\n", to_string(r), e.what());
    }
  }
  write_fit_csv((fs::path(in) / "fit.csv").string(), fits);
  const std::string text = summarize(res, fits, risky_reaction_report(res.points));
  std::ofstream((fs::path(in) / "summary.txt").string()) << text;
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flux-limited chemotaxis with reaction: simulation and verification tools"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run the full system and report the half-time");
  s->add_option("--params", sim.params, "Parameter config file")->required();
  s->add_option("--backend", sim.backend, "planar or radial")
      ->check(CLI::IsMember({"planar", "radial"}));
  s->add_option("--grid", sim.grid, "Cells per side (planar) or radial cells; 0 = default");
  s->add_option("--tmax", sim.tmax, "Final time");
  s->add_option("--out", sim.out, "Output directory");
  s->add_option("--rho1", sim.rho1, "radial-ring or offset-bump");
  s->add_option("--bump-angle", sim.bump_angle, "Offset bump direction (radians)");
  s->add_option("--probes", sim.probes, "Local-mass probe radii");
  s->add_flag("--baseline", sim.baseline, "Diffusion-only baseline (Psi = 0)");
  s->add_flag("--no-stop", sim.no_stop, "Run to --tmax instead of stopping at the half-time");
  s->add_flag("--snapshot", sim.snapshot, "Write final fields");

  std::string params, out;
  int angles = 256, radii = 60, family_n = 64, n_random = 50;
  std::uint64_t seed = 12345;
  auto* vp = app.add_subcommand("verify-potential", "Check that dH dominates the family drifts");
  vp->add_option("--params", params, "Parameter config file")->required();
  vp->add_option("--out", out, "CSV report")->required();
  vp->add_option("--angles", angles, "Boundary samples per circle");
  vp->add_option("--radii", radii, "Log-spaced radii on (r0, 4 R0]");
  vp->add_option("--family-grid", family_n, "Cells per side for family members");
  vp->add_option("--random", n_random, "Random family members");
  vp->add_option("--seed", seed, "Random member seed");

  int levels = 3;
  double t_end = 0.0;
  auto* vd = app.add_subcommand("verify-duality", "Paired Fokker-Planck / dual solves");
  vd->add_option("--params", params, "Parameter config file")->required();
  vd->add_option("--out", out, "CSV report")->required();
  vd->add_option("--levels", levels, "Number of grid refinements (factor 2 each)");
  vd->add_option("--t", t_end, "Comparison time; 0 = R0^2/gamma");

  int stage = 0, n_times = 10;
  auto* vb = app.add_subcommand("verify-barrier", "Barrier margin tables for both stages");
  vb->add_option("--params", params, "Parameter config file")->required();
  vb->add_option("--out", out, "CSV report")->required();
  vb->add_option("--stage", stage, "1, 2, or 0 for both");
  vb->add_option("--times", n_times, "Sampled times per stage");

  auto* kb = app.add_subcommand("kernel-bound", "Harnack constants, C2 and the kernel battery");
  kb->add_option("--out", out, "CSV of the validation battery (skipped if empty)");

  std::string spec_path, in_dir;
  int workers = 0;
  std::size_t min_points = 4;
  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
  sw->add_option("--spec", spec_path, "Sweep config file")->required();
  sw->add_option("--out", out, "Output directory")->required();
  sw->add_option("--workers", workers, "Worker threads (overrides the spec)");

  auto* fs_cmd = app.add_subcommand("fit-scaling", "Fit bound constants to a sweep");
  fs_cmd->add_option("--in", in_dir, "Sweep output directory")->required();
  fs_cmd->add_option("--min-points", min_points, "Uncensored points required per regime");

  CLI11_PARSE(app, argc, argv);
  try {
    if (s->parsed()) return simulate(sim);
    if (vp->parsed()) return verify_potential(params, out, angles, radii, family_n, n_random, seed);
    if (vd->parsed()) return verify_duality(params, out, levels, t_end);
    if (vb->parsed()) return verify_barrier(params, out, stage, n_times);
    if (kb->parsed()) return kernel_bound(out);
    if (sw->parsed()) return sweep(spec_path, out, workers);
    if (fs_cmd->parsed()) return fit_scaling_cmd(in_dir, min_points);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
