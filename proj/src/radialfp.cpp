#include "fluxchemo/radialfp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fluxchemo/errors.hpp"
#include "fluxchemo/initial.hpp"
#include "fluxchemo/quadrature.hpp"

namespace fluxchemo {

namespace {

constexpr double kPi = std::numbers::pi;

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

std::vector<double> cell_volumes(const RadialGrid& g) {
  std::vector<double> v(g.n);
  const double dr = g.dr();
  for (int i = 0; i < g.n; ++i) v[i] = kPi * dr * dr * (2.0 * i + 1.0);
  return v;
}

void check_save_times(const std::vector<double>& save_times) {
  for (std::size_t k = 0; k < save_times.size(); ++k) {
    if (!(save_times[k] >= 0.0) || (k > 0 && save_times[k] < save_times[k - 1])) {
      throw ConfigError("save times must be nonnegative and nondecreasing");
    }
  }
}

// Drives an explicit update to each save time, shortening the last step.
template <class Step>
void march(RadialTrajectory& traj, std::vector<double>& state, const std::vector<double>& save_times,
           double dt_limit, const SolveOptions& opt, Step&& step) {
  if (opt.dt > 0.0 && opt.dt > dt_limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << opt.dt << " exceeds the explicit limit " << dt_limit;
    throw CflError(os.str(), opt.dt_safety * dt_limit);
  }
  const double dt_nominal = opt.dt > 0.0 ? opt.dt : opt.dt_safety * dt_limit;
  double t = 0.0;
  for (double target : save_times) {
    while (t < target) {
      double dt = std::min(dt_nominal, target - t);
      // Avoid a sliver step that would only add roundoff.
      if (target - t - dt < 1e-9 * dt_nominal) dt = target - t;
      step(dt);
      t = (dt == target - t) ? target : t + dt;
    }
    traj.times.push_back(target);
    traj.values.push_back(state);
  }
}

}  // namespace

RadialGrid RadialGrid::make(const PotentialH& pot, double r_max, int n) {
  if (n < 2 || !(r_max > 0.0)) throw ConfigError("radial grid needs n >= 2 and r_max > 0");
  RadialGrid g{r_max, n};
  if (!pot.is_flat()) {
    if (r_max < 4.0 * pot.R0() * (1.0 - 1e-12)) throw ConfigError("radial grid must reach 4 R0");
    if (g.dr() > pot.r0() / 10.0 * (1.0 + 1e-12)) {
      throw ResolutionError("radial grid spacing must resolve r0 (dr <= r0/10)");
    }
  }
  return g;
}

RadialGrid RadialGrid::reference(const PotentialH& pot, double r_min, int refine) {
  const double r_max = std::max(4.0 * pot.R0(), r_min);
  const double target = pot.r0() / (10.0 * refine);
  const int n = static_cast<int>(std::ceil(r_max / target - 1e-9));
  return make(pot, r_max, n);
}

double RadialTrajectory::at(std::size_t k, double r) const {
  const std::vector<double>& v = values.at(k);
  const double dr = grid.dr();
  if (nodal) {
    const double x = std::clamp(r / dr, 0.0, static_cast<double>(grid.n));
    const auto i = std::min(static_cast<int>(x), grid.n - 1);
    const double w = x - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
  }
  const int i = std::clamp(static_cast<int>(r / dr), 0, grid.n - 1);
  return v[i];
}

std::vector<double> cell_average(const RadialGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> out(grid.n);
  const double dr = grid.dr();
  for (int i = 0; i < grid.n; ++i) {
    const double a = i * dr;
    const double b = a + dr;
    out[i] = integrate([&](double s) { return s * f(s); }, a, b, 2, 8) / (0.5 * (b * b - a * a));
  }
  return out;
}

std::vector<double> cumulative_mass(const RadialGrid& grid, const std::vector<double>& u) {
  const std::vector<double> vol = cell_volumes(grid);
  std::vector<double> m(grid.n + 1, 0.0);
  long double acc = 0.0L;
  for (int i = 0; i < grid.n; ++i) {
    acc += static_cast<long double>(u[i]) * vol[i];
    m[i + 1] = static_cast<double>(acc);
  }
  return m;
}

double radial_pairing(const RadialGrid& grid, const std::vector<double>& a,
                      const std::vector<double>& b) {
  const std::vector<double> vol = cell_volumes(grid);
  long double acc = 0.0L;
  for (int i = 0; i < grid.n; ++i) acc += static_cast<long double>(a[i]) * b[i] * vol[i];
  return static_cast<double>(acc);
}

namespace {

// e^{H - H_max} at cell centers and faces (face i is the outer face of cell i).
struct DualWeights {
  std::vector<double> cell;
  std::vector<double> face;
};

DualWeights dual_weights(const PotentialH& pot, const RadialGrid& g) {
  DualWeights w;
  w.cell.resize(g.n);
  w.face.resize(g.n);
  double hmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n; ++i) {
    hmax = std::max({hmax, pot.H(g.center(i)), pot.H(g.node(i + 1))});
  }
  for (int i = 0; i < g.n; ++i) {
    w.cell[i] = std::exp(pot.H(g.center(i)) - hmax);
    w.face[i] = std::exp(pot.H(g.node(i + 1)) - hmax);
  }
  return w;
}

}  // namespace

double dual_invariant(const PotentialH& pot, const RadialGrid& grid, const std::vector<double>& f) {
  const DualWeights w = dual_weights(pot, grid);
  const std::vector<double> vol = cell_volumes(grid);
  long double acc = 0.0L;
  for (int i = 0; i < grid.n; ++i) acc += static_cast<long double>(f[i]) * w.cell[i] * vol[i];
  return static_cast<double>(acc);
}

RadialTrajectory solve_Mu(const PotentialH& pot, const RadialGrid& grid,
                          const std::vector<double>& M0, const std::vector<double>& save_times,
                          SolveOptions opt) {
  const int n = grid.n;
  if (static_cast<int>(M0.size()) != n + 1) throw ConfigError("M0 must have n + 1 node values");
  if (M0.front() != 0.0) throw ConfigError("M0 must vanish at r = 0");
  for (int i = 1; i <= n; ++i) {
    if (M0[i] < M0[i - 1]) throw ConfigError("M0 must be nondecreasing in r");
  }
  check_save_times(save_times);
  const double dr = grid.dr();
  std::vector<double> w(n + 1, 0.0);
  double rate = 0.0;
  for (int i = 1; i < n; ++i) {
    const double r = grid.node(i);
    w[i] = 1.0 / r + pot.dH(r);
    rate = std::max(rate, 2.0 / (dr * dr) + std::abs(w[i]) / dr);
  }
  const double total = M0.back();
  const double tol = 1e-8 * std::max(total, 1e-300);

  RadialTrajectory traj{grid, true, {}, {}};
  std::vector<double> m = M0;
  std::vector<double> next(n + 1);
  march(traj, m, save_times, 1.0 / rate, opt, [&](double dt) {
    next[0] = 0.0;
    next[n] = total;
    for (int i = 1; i < n; ++i) {
      const double diff = (m[i + 1] - 2.0 * m[i] + m[i - 1]) / (dr * dr);
      const double grad = w[i] > 0.0 ? (m[i] - m[i - 1]) / dr : (m[i + 1] - m[i]) / dr;
      next[i] = m[i] + dt * (diff - w[i] * grad);
    }
    m.swap(next);
    for (int i = 1; i <= n; ++i) {
      if (m[i] < m[i - 1] - tol) {
        throw NumericalError("M_u lost monotonicity in r at r = " + std::to_string(grid.node(i)));
      }
      if (!std::isfinite(m[i])) throw NumericalError("non-finite M_u");
    }
  });
  return traj;
}

RadialTrajectory solve_fp(const PotentialH& pot, const RadialGrid& grid,
                          const std::vector<double>& u0, const std::vector<double>& save_times,
                          SolveOptions opt) {
  const int n = grid.n;
  if (static_cast<int>(u0.size()) != n) throw ConfigError("u0 must have n cell values");
  check_save_times(save_times);
  const double dr = grid.dr();
  const std::vector<double> vol = cell_volumes(grid);
  // Outer face i at r = (i+1) dr; the last one is a wall.
  std::vector<double> len(n), vel(n);
  for (int i = 0; i < n; ++i) {
    len[i] = 2.0 * kPi * grid.node(i + 1);
    vel[i] = pot.dH(grid.node(i + 1));
    if (std::abs(vel[i]) * dr >= 2.0) throw ResolutionError("cell Peclet number too large for solve_fp");
  }
  double rate = 0.0;
  for (int i = 0; i < n; ++i) {
    double out = 0.0;
    if (i + 1 < n) out += len[i] * (1.0 / dr + 0.5 * vel[i]);
    if (i > 0) out += len[i - 1] * (1.0 / dr - 0.5 * vel[i - 1]);
    rate = std::max(rate, out / vol[i]);
  }

  RadialTrajectory traj{grid, false, {}, {}};
  std::vector<double> u = u0;
  std::vector<double> next(n);
  march(traj, u, save_times, 1.0 / rate, opt, [&](double dt) {
    next = u;
    for (int i = 0; i + 1 < n; ++i) {
      // Outward flux -u_r + u H' with the face value averaged.
      const double j = -(u[i + 1] - u[i]) / dr + vel[i] * 0.5 * (u[i] + u[i + 1]);
      const double moved = dt * j * len[i];
      next[i] -= moved / vol[i];
      next[i + 1] += moved / vol[i + 1];
    }
    u.swap(next);
  });
  return traj;
}

RadialTrajectory solve_dual(const PotentialH& pot, const RadialGrid& grid,
                            const std::vector<double>& f0, const std::vector<double>& save_times,
                            SolveOptions opt) {
  const int n = grid.n;
  if (static_cast<int>(f0.size()) != n) throw ConfigError("f0 must have n cell values");
  check_save_times(save_times);
  const double dr = grid.dr();
  const std::vector<double> vol = cell_volumes(grid);
  const DualWeights w = dual_weights(pot, grid);
  // Face conductances e^H |face| / dr and cell capacities e^H |cell|.
  std::vector<double> cond(n), cap(n);
  for (int i = 0; i < n; ++i) {
    cond[i] = w.face[i] * 2.0 * kPi * grid.node(i + 1) / dr;
    cap[i] = w.cell[i] * vol[i];
  }
  double dt_limit = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double out = cond[i] + (i > 0 ? cond[i - 1] : 0.0);
    dt_limit = std::min(dt_limit, cap[i] / out);
  }
  const double far = f0.back();

  RadialTrajectory traj{grid, false, {}, {}};
  std::vector<double> f = f0;
  std::vector<double> next(n);
  march(traj, f, save_times, dt_limit, opt, [&](double dt) {
    for (int i = 0; i < n; ++i) {
      const double outer = i + 1 < n ? f[i + 1] : far;
      double div = cond[i] * (outer - f[i]);
      if (i > 0) div -= cond[i - 1] * (f[i] - f[i - 1]);
      next[i] = f[i] + dt * div / cap[i];
    }
    f.swap(next);
    for (int i = 0; i < n; ++i) {
      if (f[i] < -1e-10 || !std::isfinite(f[i])) {
        throw NumericalError("dual solution became negative at r = " + std::to_string(grid.center(i)));
      }
    }
  });
  return traj;
}

double duality_check(const RadialTrajectory& u, const RadialTrajectory& f, std::size_t k) {
  if (u.grid.n != f.grid.n || u.grid.r_max != f.grid.r_max || u.nodal || f.nodal) {
    throw ConfigError("duality_check: grids differ");
  }
  if (k >= u.times.size() || k >= f.times.size() ||
      std::abs(u.times[k] - f.times[k]) > 1e-12 * (1.0 + u.times[k])) {
    throw ConfigError("duality_check: trajectories not saved at matching times");
  }
  const double lhs = radial_pairing(u.grid, f.values[0], u.values[k]);
  const double rhs = radial_pairing(u.grid, f.values[k], u.values[0]);
  if (k == 0) return 0.0;
  return std::abs(lhs - rhs) / lhs;
}

double boundary_lower_bound(double gamma) {
  if (!(gamma >= 16.0)) throw RegimeError("boundary_lower_bound needs gamma >= 16");
  return 1.0 - std::pow(1.5, 2.0 - gamma / 4.0);
}

double plateau(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  return smooth_step((outer - r) / (outer - inner));
}

BarrierSpec BarrierSpec::stage1(const Params& p) {
  BarrierSpec s;
  s.stage = 1;
  s.gamma = p.gamma;
  s.v0 = p.v0;
  s.R0 = p.R0;
  s.d0 = 2.0 / p.v0;
  s.d1 = 4.0 / p.v0;
  return s;
}

BarrierSpec BarrierSpec::stage2(const Params& p) {
  BarrierSpec s = stage1(p);
  s.stage = 2;
  const double gap = std::max(p.L - p.R0, 0.0);
  s.t0 = 64.0 * gap * gap / p.gamma;
  s.t_star = 16.0 / p.v0 * (4.0 * p.R0 - s.d1) + s.t0;
  return s;
}

double BarrierSpec::omega(double r) const {
  if (stage == 1) {
    const double s = (r - R0) / (0.5 * R0);
    return 0.5 * std::max(1.0 - s, 0.0);
  }
  const double s = (r - d0) / d0;
  return 0.5 * std::pow(std::max(1.0 - s, 0.0), 1.25);
}

double BarrierSpec::phi(double t) const {
  if (stage == 1) return 2.0 * R0 / std::sqrt(4.0 * R0 * R0 + gamma * t);
  const double tt = std::clamp(t, t0, t_star);
  return 1.0 / (1.0 + v0 * (tt - t0) / (16.0 * (d1 - d0)));
}

double BarrierSpec::claim_radius(double t) const {
  if (stage == 1) return R0 + std::sqrt(4.0 * R0 * R0 + gamma * t) / 8.0;
  return 2.0 * R0;
}

double BarrierSpec::initial(double r) const {
  if (stage == 1) return plateau(r, 1.5 * R0, 2.0 * R0);
  return plateau(r, d1, 5.0 / v0);
}

BarrierReport check_barrier(const RadialTrajectory& f, const BarrierSpec& spec) {
  if (f.values.empty() || f.nodal) throw ConfigError("check_barrier needs a cell trajectory");
  const RadialGrid& g = f.grid;
  const double dr = g.dr();
  const std::vector<double>& f0 = f.values.front();
  const double full = spec.stage == 1 ? 1.5 * spec.R0 : spec.d1;
  const double zero = spec.stage == 1 ? 2.0 * spec.R0 : 5.0 / spec.v0;
  for (int i = 0; i < g.n; ++i) {
    const double a = i * dr;
    const double b = a + dr;
    const bool bad = f0[i] < -1e-12 || f0[i] > 1.0 + 1e-12 ||
                     (b <= full && f0[i] < 1.0 - 1e-9) || (a >= zero && f0[i] != 0.0);
    if (bad) {
      std::ostringstream os;
      os << "initial data violates the stage-" << spec.stage << " sandwich at r = " << g.center(i);
      throw ConfigError(os.str());
    }
  }

  BarrierReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    const double t = f.times[k];
    if (spec.stage == 2 && t < spec.t_star) continue;
    BarrierRow row;
    row.t = t;
    row.radius = spec.claim_radius(t);
    row.f_min = std::numeric_limits<double>::infinity();
    row.subsolution_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n; ++i) {
      const double a = i * dr;
      if (a < row.radius) row.f_min = std::min(row.f_min, f.values[k][i]);
      const double c = g.center(i);
      if (c >= spec.anchor()) {
        row.subsolution_margin =
            std::min(row.subsolution_margin, f.values[k][i] - spec.omega_phi(c, t));
      }
    }
    row.margin = row.f_min - spec.claim_level();
    row.f_anchor = f.at(k, spec.anchor());
    rep.worst_margin = std::min(rep.worst_margin, row.margin);
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) rep.worst_margin = 0.0;
  return rep;
}

BarrierReport barrier_experiment(const Params& p, int stage, int n_times) {
  if (stage != 1 && stage != 2) throw ConfigError("barrier stage must be 1 or 2");
  if (n_times < 1) throw ConfigError("barrier_experiment needs n_times >= 1");
  const PotentialH pot = build_potential(p);
  const RadialGrid grid = RadialGrid::reference(pot);
  const BarrierSpec spec = stage == 1 ? BarrierSpec::stage1(p) : BarrierSpec::stage2(p);
  std::vector<double> times{0.0};
  if (stage == 1) {
    const double T = 64.0 * p.R0 * p.R0 / p.gamma;
    for (int k = 1; k <= n_times; ++k) times.push_back(T * k / n_times);
  } else {
    const double span = 0.5 * spec.t_star;
    for (int k = 0; k < n_times; ++k) {
      times.push_back(spec.t_star + (n_times > 1 ? span * k / (n_times - 1) : 0.0));
    }
  }
  const auto f0 = cell_average(grid, [&](double r) { return spec.initial(r); });
  return check_barrier(solve_dual(pot, grid, f0, times), spec);
}

std::vector<DualityRow> duality_experiment(const Params& p, const std::vector<int>& refinements,
                                           double t_end) {
  const PotentialH pot = build_potential(p);
  if (t_end <= 0.0) t_end = p.R0 * p.R0 / p.gamma;
  const std::vector<double> times{0.0, 0.25 * t_end, t_end};
  std::vector<DualityRow> rows;
  for (int refine : refinements) {
    const RadialGrid grid = RadialGrid::reference(pot, 0.0, refine);
    const auto u0 = cell_average(grid, [&](double r) { return ring_shape(r, p.L); });
    const auto f0 =
        cell_average(grid, [&](double r) { return plateau(r, 2.0 / p.v0, 4.0 / p.v0); });
    const RadialTrajectory u = solve_fp(pot, grid, u0, times);
    const RadialTrajectory f = solve_dual(pot, grid, f0, times);
    const double inv0 = dual_invariant(pot, grid, f.values[0]);
    for (std::size_t k = 1; k < times.size(); ++k) {
      DualityRow row;
      row.refine = refine;
      row.n = grid.n;
      row.dr = grid.dr();
      row.t = times[k];
      row.discrepancy = duality_check(u, f, k);
      row.invariant_drift = std::abs(dual_invariant(pot, grid, f.values[k]) - inv0) / inv0;
      rows.push_back(row);
    }
  }
  return rows;
}

ComparisonReport comparison_check(const Diagnostics& diag, const RadialTrajectory& Mu,
                                  double theta, double M0, double t_end) {
  if (diag.times.empty() || Mu.times.empty() || Mu.times.back() < diag.times.front() ||
      diag.times.back() < Mu.times.front()) {
    throw ConfigError("comparison_check: trajectory time ranges are disjoint");
  }
  ComparisonReport rep;
  rep.allowance = 0.02 * M0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (std::size_t k = 0; k < diag.times.size(); ++k) {
    const double t = diag.times[k];
    if (t > t_end) break;
    while (j < Mu.times.size() && Mu.times[j] < t - 1e-9 * (1.0 + t)) ++j;
    if (j == Mu.times.size() || std::abs(Mu.times[j] - t) > 1e-9 * (1.0 + t)) {
      throw ConfigError("comparison_check: M_u not saved at t = " + std::to_string(t));
    }
    for (std::size_t p = 0; p < diag.probe_radii.size(); ++p) {
      const double r = diag.probe_radii[p];
      const double margin = diag.M_probe[k][p] - (Mu.at(j, r) - kPi * theta);
      ++rep.checked;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_r = r;
        rep.worst_t = t;
      }
    }
  }
  if (rep.checked == 0) rep.worst_margin = 0.0;
  return rep;
}

double fit_C1(const RadialTrajectory& Mu, const Params& p) {
  if (Mu.times.empty()) return std::numeric_limits<double>::infinity();
  const double total = Mu.values.front().back();
  const double r = 5.0 / p.v0;
  const double gap = std::max(p.L - p.R0, 0.0);
  const double t0 = 64.0 * gap * gap / p.gamma;
  std::size_t last_bad = Mu.times.size();
  for (std::size_t k = 0; k < Mu.times.size(); ++k) {
    if (Mu.at(k, r) < total / 5.0) last_bad = k;
  }
  if (last_bad == Mu.times.size()) return 0.0;
  if (last_bad + 1 == Mu.times.size()) return std::numeric_limits<double>::infinity();
  return std::max(Mu.times[last_bad] - t0, 0.0) * p.v0 * p.v0 / p.gamma;
}

}  // namespace fluxchemo
