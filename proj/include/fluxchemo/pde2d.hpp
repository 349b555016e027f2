#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fluxchemo/chemo.hpp"
#include "fluxchemo/cutoff.hpp"
#include "fluxchemo/grid.hpp"
#include "fluxchemo/initial.hpp"
#include "fluxchemo/params.hpp"

namespace fluxchemo {

/// Change of the two total masses over one step.
struct StepDelta {
  double dm1 = 0.0;
  double dm2 = 0.0;
  double reaction = 0.0;  // mass removed from each species by the reaction
};

/// Common interface of the planar solver and its exact radial reduction.
class Simulation {
 public:
  virtual ~Simulation() = default;

  virtual double time() const = 0;
  /// Largest admissible explicit step in the current state.
  virtual double max_dt() const = 0;
  /// Advances by dt. Throws CflError if dt > max_dt(), NumericalError on NaN.
  virtual StepDelta step(double dt) = 0;

  virtual double mass1() const = 0;
  virtual double mass2() const = 0;
  /// h = eps * int rho1 rho2.
  virtual double reaction_rate() const = 0;
  /// Mass of rho1 in B(0, r). Throws DomainError beyond the grid.
  virtual double local_mass(double r) const = 0;
  virtual double theta() const = 0;

  /// Writes the current fields to dir (used for NaN dumps and snapshots).
  virtual void dump(const std::string& dir, const std::string& tag) const = 0;
};

struct Diagnostics {
  std::vector<double> times;
  std::vector<double> mass1;
  std::vector<double> mass2;
  std::vector<double> h;
  std::vector<double> cumulative_h;
  std::vector<double> probe_radii;
  /// M_probe[k][p]: local mass at probe p at times[k].
  std::vector<std::vector<double>> M_probe;

  std::size_t steps = 0;
  /// Per-step |dm1 - dm2|: largest absolute value, and the number of steps
  /// where it exceeded conservation_rel |dm2| + conservation_abs.
  double worst_step_mismatch = 0.0;
  std::size_t conservation_failures = 0;
  double conservation_abs = 0.0;  // floor actually used
  std::vector<StepDelta> step_log;       // filled when RunConfig::log_steps

  bool stopped = false;          // stop predicate fired
  bool budget_exceeded = false;  // wall-clock budget hit, partial result

  std::size_t size() const { return times.size(); }
};

struct RunConfig {
  double T_max = 0.0;
  /// Record at least every `record_every` time units ...
  double record_every = 0.25;
  /// ... and whenever mass2 moved by this fraction since the last record.
  double record_mass2_change = 0.005;
  std::vector<double> probes;
  /// Fixed dt; 0 picks dt_safety * max_dt() every step.
  double dt = 0.0;
  double dt_safety = 0.9;
  /// Wall-clock budget in seconds; 0 disables.
  double wall_budget = 0.0;
  /// Directory for a state dump on NaN; empty disables.
  std::string dump_dir;
  bool log_steps = false;
  /// Per-step conservation tolerance: relative to |dm2|, plus an absolute
  /// floor of conservation_ulps * DBL_EPSILON * mass1(0) for the roundoff of
  /// the transport update (which conserves mass exactly in exact arithmetic).
  double conservation_rel = 1e-9;
  double conservation_ulps = 4.0;
};

using StopPredicate = std::function<bool(const Diagnostics&)>;

/// Fires once mass2 <= pi theta.
StopPredicate stop_at_half_mass(double theta);

/// Advances until stop fires at a recorded sample, T_max is reached, or the
/// wall budget runs out. T_max = 0 returns an empty trajectory.
Diagnostics run(Simulation& sim, const RunConfig& cfg, const StopPredicate& stop = {});

/// Last time mass2 >= pi theta, linearly interpolated between samples;
/// +infinity if never crossed. Throws NumericalError if mass2 increases.
double half_time(const Diagnostics& diag, double theta);

/// Planar state: densities, cached drift, grid.
struct SimState {
  double t = 0.0;
  Field2D rho1;
  Field2D rho2;
  DriftField drift;
  const Grid2D& grid() const { return rho1.grid; }
};

struct PlanarOptions {
  bool chemotaxis = true;  // false: Psi == 0 (diffusion-only baseline)
  /// Recompute grad c every step instead of on 0.1% changes of |rho2|_1.
  bool exact_recompute = false;
  double recompute_tol = 1e-3;
};

/// Explicit finite-volume solver on a square with zero-flux walls:
/// 5-point diffusion, first-order upwind drift with face velocities averaged
/// from cell centers, then the local reaction solved exactly per cell.
class PlanarSimulation : public Simulation {
 public:
  PlanarSimulation(const Params& p, const InitialData& init, PlanarOptions opt = {});
  /// Uses an explicit cutoff (e.g. Cutoff::none()) instead of the one from p.
  PlanarSimulation(const Params& p, const Field2D& rho1, const Field2D& rho2, const Cutoff& psi,
                   PlanarOptions opt = {});
  ~PlanarSimulation() override;

  double time() const override { return state_.t; }
  double max_dt() const override;
  StepDelta step(double dt) override;
  double mass1() const override;
  double mass2() const override;
  double reaction_rate() const override;
  double local_mass(double r) const override;
  double theta() const override { return params_.theta; }
  void dump(const std::string& dir, const std::string& tag) const override;

  const SimState& state() const { return state_; }
  /// Number of grad c evaluations so far.
  std::size_t gradient_evaluations() const { return grad_evals_; }
  /// rho2 touched the outermost ring of cells when grad c was last computed.
  bool support_touches_boundary() const { return touches_boundary_; }

 private:
  void refresh_drift(bool force);

  Params params_;
  Cutoff psi_;
  PlanarOptions opt_;
  SimState state_;
  std::unique_ptr<PlanarGradient> gradient_;
  std::vector<std::size_t> support_;  // cells with rho2 > 0
  double mass2_at_drift_ = -1.0;
  std::size_t grad_evals_ = 0;
  bool touches_boundary_ = false;
  std::vector<double> flux_;
};

/// Mass of a planar density in B(0, r) with exact circle-cell overlap.
/// r = +infinity gives the total; r beyond the grid's corners throws DomainError.
double local_mass(const Field2D& rho, double r);

/// Radial initial data on cells of width dr out to r_max: ring rho1 with mass
/// M0 (exact cell quadrature) and rho2 = 2 theta eta.
struct RadialInitial {
  RadialProfile rho1;
  RadialProfile rho2;
};
RadialInitial make_radial_initial(const Params& p, double dr, double r_max);

/// Exact reduction of the full system for radial data: rho1(r), rho2(r) on
/// annular cells, grad c from the enclosed attractant mass. Zero-flux walls at
/// r = 0 and r_max.
class RadialSimulation : public Simulation {
 public:
  RadialSimulation(const Params& p, const RadialInitial& init, bool chemotaxis = true);
  RadialSimulation(const Params& p, const RadialInitial& init, const Cutoff& psi);

  double time() const override { return t_; }
  double max_dt() const override;
  StepDelta step(double dt) override;
  double mass1() const override;
  double mass2() const override;
  double reaction_rate() const override;
  double local_mass(double r) const override;
  double theta() const override { return params_.theta; }
  void dump(const std::string& dir, const std::string& tag) const override;

  const RadialProfile& rho1() const { return rho1_; }
  const RadialProfile& rho2() const { return rho2_; }
  /// Radial drift at the outer face of each cell.
  const std::vector<double>& face_drift() const { return drift_; }

 private:
  void refresh_drift();

  Params params_;
  Cutoff psi_;
  double t_ = 0.0;
  RadialProfile rho1_;
  RadialProfile rho2_;
  std::vector<double> vol_;    // annulus areas
  std::vector<double> drift_;  // at faces i + 1/2
  std::size_t support_end_ = 0;
  std::vector<double> flux_;
};

// Array files: flat little-endian float64 plus a text sidecar "<base>.hdr"
// with shape, spacing, half_width and time.
void write_field(const std::string& base, const Field2D& f, double t);
Field2D read_field(const std::string& base, double* t = nullptr);
void write_profile(const std::string& base, const RadialProfile& f, double t);
RadialProfile read_profile(const std::string& base, double* t = nullptr);

/// Diagnostics as CSV: t, mass1, mass2, h, cumulative_h, M(r_p) per probe.
void write_diagnostics_csv(const std::string& path, const Diagnostics& d);

}  // namespace fluxchemo
