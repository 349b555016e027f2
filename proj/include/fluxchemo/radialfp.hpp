#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fluxchemo/grid.hpp"
#include "fluxchemo/params.hpp"
#include "fluxchemo/pde2d.hpp"
#include "fluxchemo/potential.hpp"

namespace fluxchemo {

/// n cells of width r_max/n on [0, r_max].
struct RadialGrid {
  double r_max = 0.0;
  int n = 0;

  double dr() const { return r_max / n; }
  double center(int i) const { return (i + 0.5) * dr(); }
  double node(int i) const { return i * dr(); }

  /// Checks r_max >= 4 R0 (ConfigError) and dr <= r0/10 (ResolutionError)
  /// unless the potential is flat.
  static RadialGrid make(const PotentialH& pot, double r_max, int n);
  /// Smallest grid with r_max = max(4 R0, r_min) and dr <= r0 / (10 refine).
  static RadialGrid reference(const PotentialH& pot, double r_min = 0.0, int refine = 1);
};

/// Saved states of a radial solve. For cell data values[k][i] is the average
/// over [i dr, (i+1) dr); for node data (M_u) values[k][i] sits at r = i dr.
struct RadialTrajectory {
  RadialGrid grid;
  bool nodal = false;
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  /// Piecewise-linear (nodal) or piecewise-constant (cell) value at r.
  double at(std::size_t k, double r) const;
};

struct SolveOptions {
  double dt_safety = 0.9;
  /// Fixed time step; 0 uses dt_safety times the stability limit.
  double dt = 0.0;
};

/// Local mass of the auxiliary Fokker-Planck flow,
///   d_t M = d_rr M - (1/r + H') d_r M,  M(0) = 0, M(r_max) = M0(r_max),
/// explicit with the first-order term upwinded. M0 holds node values
/// (size n + 1). Throws NumericalError if monotonicity in r is lost by more
/// than 1e-8 of the total, CflError if a fixed dt is too large.
RadialTrajectory solve_Mu(const PotentialH& pot, const RadialGrid& grid,
                          const std::vector<double>& M0, const std::vector<double>& save_times,
                          SolveOptions opt = {});

/// Fokker-Planck d_t u = Lap u - div(u grad H) for radial u (cell averages),
/// conservative with centered face fluxes and zero flux at r_max.
RadialTrajectory solve_fp(const PotentialH& pot, const RadialGrid& grid,
                          const std::vector<double>& u0, const std::vector<double>& save_times,
                          SolveOptions opt = {});

/// Dual equation d_t f = Lap f + grad H . grad f in the symmetric form
/// e^H d_t f = div(e^H grad f); Dirichlet at r_max with the initial outer
/// value. Preserves the discrete sum of f e^H and the maximum principle.
/// Throws NumericalError on negativity below -1e-10.
RadialTrajectory solve_dual(const PotentialH& pot, const RadialGrid& grid,
                            const std::vector<double>& f0, const std::vector<double>& save_times,
                            SolveOptions opt = {});

/// Cell values of a radial function sampled by Gauss quadrature per cell.
std::vector<double> cell_average(const RadialGrid& grid, const std::function<double(double)>& f);

/// Node values 2 pi int_0^{r_i} s u(s) ds of a cell profile.
std::vector<double> cumulative_mass(const RadialGrid& grid, const std::vector<double>& u);

/// Planar integral of a cell profile against another: 2 pi int a b r dr.
double radial_pairing(const RadialGrid& grid, const std::vector<double>& a,
                      const std::vector<double>& b);

/// Discrete invariant int f e^H (relative to e^{H(0)}).
double dual_invariant(const PotentialH& pot, const RadialGrid& grid, const std::vector<double>& f);

/// |int f0 u(t) - int f(t) u0| / int f0 u(t) at saved index k.
/// Throws ConfigError on grid or time mismatch.
double duality_check(const RadialTrajectory& u, const RadialTrajectory& f, std::size_t k);

/// 1 - (3/2)^(2 - gamma/4). Throws RegimeError for gamma < 16.
double boundary_lower_bound(double gamma);

/// Smooth radial plateau: 1 on [0, inner], 0 from outer on (C-infinity).
double plateau(double r, double inner, double outer);

/// Barrier data for the two stages.
///
/// Stage 1 (far field): omega(r) = (1/2)(1 - (r - R0)/(R0/2))_+ for r >= R0,
/// phi(t) = 2 R0 / sqrt(4 R0^2 + gamma t); omega_phi(r, t) = omega(R0 + phi (r - R0)).
/// Stage 2 (mid range): omega(r) = (1/2)(1 - (r - d0)/d0)_+^(5/4) for r >= d0,
/// phi(t) = 1/(1 + v0 (t - t0)/(16 (d1 - d0))) up to t*, constant after.
struct BarrierSpec {
  int stage = 1;
  double gamma = 0.0;
  double v0 = 0.0;
  double R0 = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
  double t0 = 0.0;
  double t_star = 0.0;

  static BarrierSpec stage1(const Params& p);
  /// t0 = 64 max(L - R0, 0)^2 / gamma.
  static BarrierSpec stage2(const Params& p);

  /// Left end of the barrier's domain (R0 or d0).
  double anchor() const { return stage == 1 ? R0 : d0; }
  double omega(double r) const;
  double phi(double t) const;
  double omega_phi(double r, double t) const { return omega(anchor() + phi(t) * (r - anchor())); }
  /// Radius of the ball on which the stage's conclusion is asserted at time t:
  /// stage 1: R0 + sqrt(4 R0^2 + gamma t)/8; stage 2: 2 R0 (for t >= t*).
  double claim_radius(double t) const;
  /// Level asserted on that ball: 1/4 (stage 1) or 1/5 (stage 2).
  double claim_level() const { return stage == 1 ? 0.25 : 0.2; }
  /// Stage-1 initial data 1_{B_{2R0}} >= f0 >= 1_{B_{3R0/2}}; stage 2
  /// 1 >= f0 >= 1_{B_{d1}} with support in B_{5/v0}.
  double initial(double r) const;
};

struct BarrierRow {
  double t = 0.0;
  double radius = 0.0;  // claim radius
  double f_min = 0.0;   // min of f over the claimed ball
  double margin = 0.0;  // f_min - level
  double subsolution_margin = 0.0;  // min over r >= anchor of f - omega_phi
  double f_anchor = 0.0;  // f at the anchor radius
};

struct BarrierReport {
  std::vector<BarrierRow> rows;
  double worst_margin = 0.0;
  bool passed() const { return worst_margin >= 0.0; }
};

/// Checks the stage's claim at every saved time of f (stage 2: only t >= t*).
/// Throws ConfigError if f's initial state violates the stage's sandwich.
BarrierReport check_barrier(const RadialTrajectory& f, const BarrierSpec& spec);

/// Runs the stage's dual solve from its initial data on the reference grid
/// and checks the claim. Stage 1 samples t = k T/n_times, k = 1..n_times,
/// with T = 64 R0^2/gamma; stage 2 samples n_times points on [t*, 3t*/2].
BarrierReport barrier_experiment(const Params& p, int stage, int n_times = 10);

struct DualityRow {
  int refine = 1;
  int n = 0;
  double dr = 0.0;
  double t = 0.0;
  double discrepancy = 0.0;      // duality_check at t
  double invariant_drift = 0.0;  // relative change of dual_invariant over [0, t]
};

/// Paired Fokker-Planck and dual solves on the reference grid refined by each
/// factor: u0 the rho1 ring at L, f0 = plateau(r, 2/v0, 4/v0). Compared at
/// t_end/4 and t_end; t_end = 0 picks R0^2/gamma.
std::vector<DualityRow> duality_experiment(const Params& p, const std::vector<int>& refinements,
                                           double t_end = 0.0);

struct ComparisonReport {
  double worst_margin = 0.0;  // min of M - (M_u - pi theta), in mass units
  double allowance = 0.0;     // 0.02 M0
  double worst_r = 0.0;
  double worst_t = 0.0;
  std::size_t checked = 0;
  bool passed() const { return worst_margin >= -allowance; }
};

/// Verifies M(r,t) >= M_u(r,t) - pi theta at all probe radii and recorded
/// times t <= t_end, with a 2% M0 allowance. M_u must have been saved at
/// diag.times. Throws ConfigError if the time ranges are disjoint.
ComparisonReport comparison_check(const Diagnostics& diag, const RadialTrajectory& Mu,
                                  double theta, double M0, double t_end);

/// Fitted constant C1: smallest C1 >= 0 with M_u(5/v0, t) >= M0/5 for every
/// saved t >= C1 gamma/v0^2 + 64 max(L - R0, 0)^2/gamma; +infinity if the
/// level is not held at the last saved time.
double fit_C1(const RadialTrajectory& Mu, const Params& p);

}  // namespace fluxchemo
