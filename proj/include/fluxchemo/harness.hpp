#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fluxchemo/config.hpp"
#include "fluxchemo/params.hpp"

namespace fluxchemo {

enum class Backend { radial, planar };
const char* to_string(Backend b);
Backend backend_from_string(const std::string& s);

/// Terms of the half-time bound for the point's L-regime:
///   near:         1/v0^2              + 1/(eps v0^2 M0)
///   intermediate: L/v0                + 1/(eps v0^2 M0)
///   far:          L^2/gamma + gamma/v0^2 + 1/(eps v0^2 M0)
/// `transport` holds the L-dependent term, `equilibration` the other one.
struct BoundTerms {
  double transport = 0.0;
  double equilibration = 0.0;
  double reaction = 0.0;
  double total() const { return transport + equilibration + reaction; }
};
BoundTerms bound_terms(const Params& p);

struct SweepAxis {
  std::string name;  // chi, gamma, v0, eps, theta, sigma, M0, L or delta0
  std::vector<double> values;
};

struct SweepSpec {
  Params base;
  std::vector<SweepAxis> axes;
  Backend backend = Backend::radial;
  /// Radial cell width, or planar cells per unit length (rounded).
  double resolution = 1.0 / 16.0;
  double T_max = 1e5;
  bool baseline = true;
  /// Baseline horizon as a multiple of the chemotactic half-time.
  double baseline_factor = 50.0;
  /// Planar only: one offset-bump replicate per seed, the bump angle drawn
  /// from the seed. Empty runs the radial ring.
  std::vector<std::uint64_t> seeds;
  int workers = 1;

  /// Cartesian product of the axes (last axis fastest); with seeds, each
  /// parameter point repeats once per seed (seed fastest).
  /// Throws RegimeError naming the first point outside the admitted regime.
  std::vector<Params> points() const;
};

/// Reads a sweep config: the Params keys, plus `backend`, `resolution`,
/// `T_max`, `baseline` (0/1), `baseline_factor`, `seeds` (comma list),
/// `workers`, and one `sweep.<name> = v1, v2, ...` key per axis.
SweepSpec sweep_spec_from_config(const ConfigMap& m);

/// Bump angle in [0, 2 pi) for a replicate seed.
double seed_angle(std::uint64_t seed);

struct PointResult {
  std::size_t index = 0;
  Params params;
  LRegime regime = LRegime::far;
  bool has_seed = false;
  std::uint64_t seed = 0;
  /// Half-times; a censored value is the horizon, a lower bound.
  double tau = std::numeric_limits<double>::quiet_NaN();
  bool tau_censored = false;
  double tau_D = std::numeric_limits<double>::quiet_NaN();
  bool tau_D_censored = false;
  double baseline_horizon = std::numeric_limits<double>::quiet_NaN();
  BoundTerms bound;
  std::string error;  // nonempty when the point failed

  bool ok() const { return error.empty(); }
  bool has_baseline() const { return ok() && !std::isnan(tau_D); }
};

struct SweepResult {
  std::vector<PointResult> points;
};

/// Half-time of one point on the given backend; censored at T_max.
/// `chemotaxis = false` runs the Psi == 0 baseline.
struct HalfTime {
  double tau = 0.0;
  bool censored = false;
};
HalfTime measure_half_time(const Params& p, Backend backend, double resolution, double T_max,
                           bool chemotaxis, double bump_angle = std::numeric_limits<double>::quiet_NaN());

/// Runs all points on `workers` threads; results are ordered by point index.
/// Failures are recorded per point. Throws NumericalError if every point
/// failed.
SweepResult run_sweep(const SweepSpec& spec);

void write_sweep_csv(const std::string& path, const SweepResult& r);
SweepResult read_sweep_csv(const std::string& path);

struct ScalingRow {
  std::size_t index = 0;
  double L = 0.0;
  double tau = 0.0;
  double bound = 0.0;
  double ratio = 0.0;     // tau / bound
  double residual = 0.0;  // C bound - tau (>= 0)
};

struct ScalingFit {
  LRegime regime = LRegime::far;
  double C = 0.0;  // max tau / bound over uncensored points
  std::vector<ScalingRow> rows;
  std::size_t censored = 0;
  /// Least-squares slope of log tau vs log L over the largest group of points
  /// that differ only in L; NaN if that group has fewer than two L values.
  double slope = std::numeric_limits<double>::quiet_NaN();
};

/// Max-ratio fit over the points of `regime`. Throws ConfigError with fewer
/// than `min_points` uncensored points (all censored included).
ScalingFit fit_scaling(const std::vector<PointResult>& points, LRegime regime,
                       std::size_t min_points = 4);

/// Least-squares slope of log(tau_i - offset) against log(L_i). Throws
/// DomainError if fewer than two points or some tau_i <= offset.
double offset_slope(const std::vector<double>& L, const std::vector<double>& tau, double offset);

void write_fit_csv(const std::string& path, const std::vector<ScalingFit>& fits);

struct RiskyRow {
  std::size_t index = 0;
  double M0_eps = 0.0;
  double tau = 0.0;
  double tau_D = 0.0;
  double ratio = 0.0;  // tau_D / tau; a lower bound when the baseline is censored
  bool censored = false;
  bool risky = false;  // M0 eps <= 0.2
};

/// tau_D / tau for every point that has both runs.
std::vector<RiskyRow> risky_reaction_report(const std::vector<PointResult>& points);

/// Plain-text summary of fits and the risky-reaction table.
std::string summarize(const SweepResult& r, const std::vector<ScalingFit>& fits,
                      const std::vector<RiskyRow>& risky);

}  // namespace fluxchemo
