#include "fluxchemo/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "fluxchemo/chemo.hpp"
#include "fluxchemo/cutoff.hpp"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/initial.hpp"

namespace fluxchemo {

namespace {
constexpr double kPi = std::numbers::pi;
}

double erfc(double x) { return std::erfc(x); }

double kernel_bound_factor(double d, double tau, double B) {
  const double d_abs = std::abs(d);
  const double gauss =
      std::exp(-(d_abs + B * tau) * (d_abs + B * tau) / (4.0 * tau)) / std::sqrt(4.0 * kPi * tau);
  if (B == 0.0) return gauss;
  return gauss - 0.25 * B * erfc(d_abs / std::sqrt(4.0 * tau) + 0.5 * B * std::sqrt(tau));
}

double gamma_lower_bound(const KernelBoundQuery& q) {
  if (!(q.t > q.s)) throw DomainError("gamma_lower_bound needs t > s");
  if (!(q.B >= 0.0)) throw DomainError("gamma_lower_bound needs B >= 0");
  const double tau = q.t - q.s;
  return kernel_bound_factor(q.x1 - q.y1, tau, q.B) * kernel_bound_factor(q.x2 - q.y2, tau, q.B);
}

double heat_kernel_2d(double dx, double dy, double t) {
  return std::exp(-(dx * dx + dy * dy) / (4.0 * t)) / (4.0 * kPi * t);
}

HarnackResult harnack_constant(double C3, double v0) {
  if (!(C3 > 0.0) || !(v0 > 0.0)) throw DomainError("harnack_constant needs C3 > 0 and v0 > 0");
  const double t = 1.0 / (v0 * v0);
  const double reach = C3 / v0;
  auto value = [&](double d1, double d2) {
    return kernel_bound_factor(d1, t, v0) * kernel_bound_factor(d2, t, v0) / (v0 * v0);
  };

  // The bound is even in each offset, so the first quadrant suffices.
  constexpr int kGrid = 201;
  HarnackResult res;
  res.a = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kGrid; ++j) {
    const double d2 = reach * j / (kGrid - 1);
    for (int i = 0; i < kGrid; ++i) {
      const double d1 = reach * i / (kGrid - 1);
      if (d1 * d1 + d2 * d2 > reach * reach * (1.0 + 1e-12)) continue;
      const double v = value(d1, d2);
      if (v < res.a) {
        res.a = v;
        res.d1 = d1;
        res.d2 = d2;
      }
    }
  }
  // The bound decreases in each |offset|, so the infimum sits on the arc
  // |d| = reach: scan it densely, then refine the best angle by golden section.
  auto on_arc = [&](double phi) { return value(reach * std::cos(phi), reach * std::sin(phi)); };
  constexpr int kArc = 2001;
  const double step = 0.5 * kPi / (kArc - 1);
  double phi0 = 0.0;
  double f0 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kArc; ++k) {
    const double v = on_arc(k * step);
    if (v < f0) {
      f0 = v;
      phi0 = k * step;
    }
  }
  double lo = std::max(0.0, phi0 - step);
  double hi = std::min(0.5 * kPi, phi0 + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo);
  double b = lo + g * (hi - lo);
  double fa = on_arc(a);
  double fb = on_arc(b);
  for (int it = 0; it < 100; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = on_arc(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = on_arc(b);
    }
  }
  const double phi = 0.5 * (lo + hi);
  const double refined = on_arc(phi);
  if (refined < res.a) {
    res.a = refined;
    res.d1 = reach * std::cos(phi);
    res.d2 = reach * std::sin(phi);
  }
  // Report offsets in units of 1/v0 so results compare across v0.
  res.d1 *= v0;
  res.d2 *= v0;
  if (!(res.a > 0.0)) {
    std::ostringstream os;
    os << "lower bound is vacuous for C3 = " << C3 << " (infimum " << res.a << ")";
    res.diagnostic = os.str();
    res.a = 0.0;
  }
  return res;
}

double c2_partial(int kmax) {
  double sum = 0.0;
  for (int k = 0; k <= kmax; ++k) sum += std::ldexp(1.0, 2 * k) * std::exp(2.0 * (1.0 - std::ldexp(1.0, k)));
  return sum;
}

double c2_series() {
  double sum = 0.0;
  for (int k = 0;; ++k) {
    const double term = std::ldexp(1.0, 2 * k) * std::exp(2.0 * (1.0 - std::ldexp(1.0, k)));
    sum += term;
    if (term < 1e-15) break;
  }
  return sum;
}

FrozenDrift zero_drift(const Grid2D& grid) {
  return FrozenDrift{Field2D(grid), Field2D(grid), 0.0, "zero"};
}

FrozenDrift constant_drift(const Grid2D& grid, double B, double angle) {
  return FrozenDrift{Field2D(grid, B * std::cos(angle)), Field2D(grid, B * std::sin(angle)), B,
                     "constant"};
}

FrozenDrift chemotactic_drift(const Params& p, const Grid2D& grid) {
  const Field2D rho2 = make_rho2(p, grid);
  PlanarGradient gradient(grid);
  DriftField d = assemble_drift(gradient(rho2, p.sigma), Cutoff(p));
  return FrozenDrift{std::move(d.bx), std::move(d.by), p.v0, "chemotactic"};
}

std::vector<KernelCheck> kernel_bound_vs_pde(const FrozenDrift& drift, double y1, double y2,
                                             const std::vector<KernelQuery>& queries,
                                             double width) {
  std::vector<KernelCheck> out;
  if (queries.empty()) return out;
  const Grid2D& g = drift.bx.grid;
  const int n = g.n;
  const double h = g.h();

  double bmax_x = 0.0;
  double bmax_y = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double bx = drift.bx.data[k];
    const double by = drift.by.data[k];
    if (std::hypot(bx, by) > drift.B * (1.0 + 1e-12) + 1e-15) {
      throw ConfigError("drift exceeds its stated bound B");
    }
    bmax_x = std::max(bmax_x, std::abs(bx));
    bmax_y = std::max(bmax_y, std::abs(by));
  }
  double t_min = std::numeric_limits<double>::infinity();
  for (const KernelQuery& q : queries) t_min = std::min(t_min, q.t);
  if (!(t_min > 0.0)) throw ConfigError("query times must be positive");
  const double w = width > 0.0 ? width : std::sqrt(t_min) / 10.0;
  if (w > std::sqrt(t_min) / 10.0 * (1.0 + 1e-12)) {
    throw ConfigError("mollification width too large for the requested time");
  }

  auto snap = [&](double x) {
    return std::clamp(static_cast<int>(std::lround((x + g.half_width) / h - 0.5)), 0, n - 1);
  };
  const int si = snap(y1);
  const int sj = snap(y2);
  const double ys1 = g.center(si);
  const double ys2 = g.center(sj);

  std::vector<double> phi(g.size(), 0.0);
  double mass = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double dx = g.center(i) - ys1;
      const double dy = g.center(j) - ys2;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
      phi[g.index(i, j)] = v;
      mass += v;
    }
  }
  for (double& v : phi) v /= mass * h * h;

  std::vector<std::size_t> order(queries.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return queries[a].t < queries[b].t; });
  out.resize(queries.size());

  const double dt_nominal = 0.9 / (4.0 / (h * h) + (bmax_x + bmax_y) / h);
  const std::vector<double>& bx = drift.bx.data;
  const std::vector<double>& by = drift.by.data;
  std::vector<double> next(g.size());
  double t = 0.0;
  for (std::size_t idx : order) {
    const KernelQuery& q = queries[idx];
    while (t < q.t) {
      const double dt = std::min(dt_nominal, q.t - t);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const std::size_t c = g.index(i, j);
          const double e = i + 1 < n ? phi[c + 1] : phi[c];
          const double wv = i > 0 ? phi[c - 1] : phi[c];
          const double nn = j + 1 < n ? phi[c + n] : phi[c];
          const double s = j > 0 ? phi[c - n] : phi[c];
          const double lap = (e + wv + nn + s - 4.0 * phi[c]) / (h * h);
          const double adv_x = bx[c] > 0.0 ? bx[c] * (e - phi[c]) / h : bx[c] * (phi[c] - wv) / h;
          const double adv_y = by[c] > 0.0 ? by[c] * (nn - phi[c]) / h : by[c] * (phi[c] - s) / h;
          next[c] = phi[c] + dt * (lap + adv_x + adv_y);
        }
      }
      phi.swap(next);
      t = dt == q.t - t ? q.t : t + dt;
    }
    KernelCheck& chk = out[idx];
    const int xi = snap(q.x1);
    const int xj = snap(q.x2);
    chk.query = KernelQuery{g.center(xi), g.center(xj), q.t};
    chk.y1 = ys1;
    chk.y2 = ys2;
    chk.pde_value = phi[g.index(xi, xj)];
    const double dx = chk.query.x1 - ys1;
    const double dy = chk.query.x2 - ys2;
    chk.bound = gamma_lower_bound(KernelBoundQuery{chk.query.x1, chk.query.x2, ys1, ys2, q.t, 0.0, drift.B});
    const double k_t = heat_kernel_2d(dx, dy, q.t);
    chk.heat = heat_kernel_2d(dx, dy, q.t + 0.5 * w * w);
    chk.allowance = std::abs(k_t - chk.heat) + 0.01 * k_t;
  }
  return out;
}

bool KernelBattery::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const KernelCheck& c) { return c.passed(); });
}

std::vector<KernelBattery> kernel_battery(int n_queries) {
  const Grid2D grid(480, 12.0);
  const double y1 = 0.5;
  const double y2 = -0.3;
  std::vector<KernelQuery> queries;
  for (int k = 0; k < n_queries; ++k) {
    // Separations evenly spread on [0, 5], golden-angle directions.
    const double rad = n_queries > 1 ? 5.0 * k / (n_queries - 1) : 0.0;
    const double ang = 2.399963229728653 * k;
    queries.push_back(
        KernelQuery{y1 + rad * std::cos(ang), y2 + rad * std::sin(ang), k % 4 == 0 ? 0.5 : 1.0});
  }
  const Params p = Params::from_gamma(16.0, 1.0, 0.05, 0.25, 1.0, 40.0, 10.0);
  std::vector<FrozenDrift> drifts;
  drifts.push_back(zero_drift(grid));
  drifts.push_back(constant_drift(grid, 1.0, 0.3));
  drifts.push_back(chemotactic_drift(p, grid));

  std::vector<std::future<std::vector<KernelCheck>>> jobs;
  for (const FrozenDrift& d : drifts) {
    jobs.push_back(std::async(std::launch::async,
                              [&d, &queries, y1, y2] { return kernel_bound_vs_pde(d, y1, y2, queries); }));
  }
  std::vector<KernelBattery> out;
  for (std::size_t k = 0; k < drifts.size(); ++k) {
    out.push_back(KernelBattery{drifts[k].label, drifts[k].B, jobs[k].get()});
  }
  return out;
}

}  // namespace fluxchemo
