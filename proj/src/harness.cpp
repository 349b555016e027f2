#include "fluxchemo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "fluxchemo/errors.hpp"
#include "fluxchemo/initial.hpp"
#include "fluxchemo/pde2d.hpp"

namespace fluxchemo {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : cur.substr(b, e - b + 1));
  }
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(what + ": '" + s + "' is not an unsigned integer");
  }
  return v;
}

LRegime regime_from_string(const std::string& s) {
  if (s == "near") return LRegime::near;
  if (s == "intermediate") return LRegime::intermediate;
  if (s == "far") return LRegime::far;
  throw ConfigError("unknown regime '" + s + "'");
}

Params with_value(const Params& base, const std::string& name, double v) {
  double chi = base.chi, v0 = base.v0, eps = base.eps, theta = base.theta, sigma = base.sigma;
  double M0 = base.M0, L = base.L, delta0 = base.delta0;
  if (name == "chi") chi = v;
  else if (name == "gamma") chi = v * sigma / theta;
  else if (name == "v0") v0 = v;
  else if (name == "eps") eps = v;
  else if (name == "theta") theta = v;
  else if (name == "sigma") sigma = v;
  else if (name == "M0") M0 = v;
  else if (name == "L") L = v;
  else if (name == "delta0") delta0 = v;
  else throw ConfigError("cannot sweep over '" + name + "'");
  // Keep the cutoff width at the same fraction of the saturation threshold.
  const double delta = base.delta / base.beta * (v0 / chi);
  return Params::make(chi, v0, eps, theta, sigma, M0, L, delta, delta0, RegimeCheck::skip);
}

const std::vector<std::string> kSweepColumns = {
    "index", "chi", "gamma", "v0", "eps", "theta", "sigma", "M0", "L", "delta", "delta0", "R0",
    "regime", "seed", "bump_angle", "tau", "tau_censored", "tau_D", "tau_D_censored",
    "baseline_horizon", "bound_transport", "bound_equilibration", "bound_reaction",
    "bound_total", "error"};

}  // namespace

const char* to_string(Backend b) { return b == Backend::radial ? "radial" : "planar"; }

Backend backend_from_string(const std::string& s) {
  if (s == "radial") return Backend::radial;
  if (s == "planar") return Backend::planar;
  throw ConfigError("unknown backend '" + s + "' (expected radial or planar)");
}

BoundTerms bound_terms(const Params& p) {
  BoundTerms b;
  const double v2 = p.v0 * p.v0;
  b.reaction = 1.0 / (p.eps * v2 * p.M0);
  switch (classify(p)) {
    case LRegime::near:
      b.equilibration = 1.0 / v2;
      break;
    case LRegime::intermediate:
      b.transport = p.L / p.v0;
      break;
    case LRegime::far:
      b.transport = p.L * p.L / p.gamma;
      b.equilibration = p.gamma / v2;
      break;
  }
  return b;
}

std::vector<Params> SweepSpec::points() const {
  std::vector<Params> pts{base};
  for (const SweepAxis& axis : axes) {
    if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.name + "' has no values");
    std::vector<Params> next;
    for (const Params& p : pts) {
      for (double v : axis.values) next.push_back(with_value(p, axis.name, v));
    }
    pts = std::move(next);
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (auto msg = regime_violation(pts[k]); !msg.empty()) {
      throw RegimeError("sweep point " + std::to_string(k) + ": " + msg);
    }
  }
  if (seeds.empty()) return pts;
  std::vector<Params> rep;
  for (const Params& p : pts) rep.insert(rep.end(), seeds.size(), p);
  return rep;
}

SweepSpec sweep_spec_from_config(const ConfigMap& m) {
  static const std::set<std::string> harness_keys = {
      "backend", "resolution", "T_max", "baseline", "baseline_factor", "seeds", "workers"};
  std::set<std::string> ignore = harness_keys;
  for (const auto& [key, value] : m) {
    if (key.rfind("sweep.", 0) == 0) ignore.insert(key);
  }
  SweepSpec s;
  s.base = params_from_config(m, ignore);
  s.backend = backend_from_string(config_string(m, "backend", "radial"));
  s.resolution = config_real(m, "resolution", s.backend == Backend::radial ? 1.0 / 16.0 : 8.0);
  s.T_max = config_real(m, "T_max", s.T_max);
  s.baseline = config_real(m, "baseline", 1.0) != 0.0;
  s.baseline_factor = config_real(m, "baseline_factor", s.baseline_factor);
  s.workers = static_cast<int>(config_real(m, "workers", 1.0));
  if (auto it = m.find("seeds"); it != m.end() && !it->second.empty()) {
    for (const std::string& tok : split(it->second, ',')) s.seeds.push_back(to_u64(tok, "seeds"));
  }
  for (const auto& [key, value] : m) {
    if (key.rfind("sweep.", 0) != 0) continue;
    SweepAxis axis{key.substr(6), {}};
    for (const std::string& tok : split(value, ',')) axis.values.push_back(to_real(tok, key));
    s.axes.push_back(std::move(axis));
  }
  if (!(s.resolution > 0.0) || !(s.T_max > 0.0) || s.workers < 1 || !(s.baseline_factor > 0.0)) {
    throw ConfigError("resolution, T_max, baseline_factor and workers must be positive");
  }
  if (!s.seeds.empty() && s.backend != Backend::planar) {
    throw ConfigError("seeds select offset-bump replicates and need backend = planar");
  }
  s.points();  // regime gate before launch
  return s;
}

double seed_angle(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return 2.0 * std::numbers::pi * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

HalfTime measure_half_time(const Params& p, Backend backend, double resolution, double T_max,
                           bool chemotaxis, double bump_angle) {
  RunConfig cfg;
  cfg.T_max = T_max;
  Diagnostics d;
  if (backend == Backend::radial) {
    if (!std::isnan(bump_angle)) throw ConfigError("the radial backend has no offset bump");
    RadialSimulation sim(p, make_radial_initial(p, resolution, default_half_width(p)), chemotaxis);
    d = run(sim, cfg, stop_at_half_mass(p.theta));
  } else {
    const Grid2D grid = default_grid(p, static_cast<int>(std::lround(resolution)));
    const Rho1Kind kind = std::isnan(bump_angle) ? Rho1Kind::radial_ring : Rho1Kind::offset_bump;
    PlanarOptions opt;
    opt.chemotaxis = chemotaxis;
    PlanarSimulation sim(p, make_initial(p, kind, grid, std::isnan(bump_angle) ? 0.0 : bump_angle),
                         opt);
    d = run(sim, cfg, stop_at_half_mass(p.theta));
  }
  const double t = half_time(d, p.theta);
  if (std::isinf(t)) return HalfTime{T_max, true};
  return HalfTime{t, false};
}

SweepResult run_sweep(const SweepSpec& spec) {
  const std::vector<Params> pts = spec.points();
  SweepResult res;
  res.points.resize(pts.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next++; k < pts.size(); k = next++) {
      PointResult& r = res.points[k];
      r.index = k;
      r.params = pts[k];
      r.regime = classify(pts[k]);
      r.bound = bound_terms(pts[k]);
      double angle = std::numeric_limits<double>::quiet_NaN();
      if (!spec.seeds.empty()) {
        r.has_seed = true;
        r.seed = spec.seeds[k % spec.seeds.size()];
        angle = seed_angle(r.seed);
      }
      try {
        const HalfTime chem =
            measure_half_time(pts[k], spec.backend, spec.resolution, spec.T_max, true, angle);
        r.tau = chem.tau;
        r.tau_censored = chem.censored;
        if (spec.baseline && !chem.censored) {
          r.baseline_horizon = spec.baseline_factor * chem.tau;
          const HalfTime base = measure_half_time(pts[k], spec.backend, spec.resolution,
                                                  r.baseline_horizon, false, angle);
          r.tau_D = base.tau;
          r.tau_D_censored = base.censored;
        }
      } catch (const std::exception& e) {
        r.error = e.what();
        if (r.error.empty()) r.error = "unknown failure";
      }
    }
  };

  const int n_workers =
      static_cast<int>(std::min<std::size_t>(std::max(spec.workers, 1), pts.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  if (!pts.empty() && std::none_of(res.points.begin(), res.points.end(),
                                   [](const PointResult& r) { return r.ok(); })) {
    throw NumericalError("every sweep point failed; first error: " + res.points.front().error);
  }
  return res;
}

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < kSweepColumns.size(); ++c) {
    out << (c ? "," : "") << kSweepColumns[c];
  }
  out << "\n";
  for (const PointResult& p : r.points) {
    std::string err = p.error;
    std::replace_if(err.begin(), err.end(), [](char ch) { return ch == ',' || ch == '\n'; }, ';');
    const Params& q = p.params;
    out << p.index << "," << fmt(q.chi) << "," << fmt(q.gamma) << "," << fmt(q.v0) << ","
        << fmt(q.eps) << "," << fmt(q.theta) << "," << fmt(q.sigma) << "," << fmt(q.M0) << ","
        << fmt(q.L) << "," << fmt(q.delta) << "," << fmt(q.delta0) << "," << fmt(q.R0) << ","
        << to_string(p.regime) << "," << (p.has_seed ? std::to_string(p.seed) : "-") << ","
        << fmt(p.has_seed ? seed_angle(p.seed) : std::numeric_limits<double>::quiet_NaN()) << ","
        << fmt(p.tau) << "," << p.tau_censored << "," << fmt(p.tau_D) << "," << p.tau_D_censored
        << "," << fmt(p.baseline_horizon) << "," << fmt(p.bound.transport) << ","
        << fmt(p.bound.equilibration) << "," << fmt(p.bound.reaction) << ","
        << fmt(p.bound.total()) << "," << err << "\n";
  }
}

SweepResult read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != kSweepColumns) {
    throw ConfigError("'" + path + "' is not a sweep table");
  }
  SweepResult r;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != kSweepColumns.size()) throw ConfigError("malformed sweep row: " + line);
    PointResult p;
    p.index = to_u64(f[0], "index");
    p.params = Params::make(to_real(f[1], "chi"), to_real(f[3], "v0"), to_real(f[4], "eps"),
                            to_real(f[5], "theta"), to_real(f[6], "sigma"), to_real(f[7], "M0"),
                            to_real(f[8], "L"), to_real(f[9], "delta"), to_real(f[10], "delta0"),
                            RegimeCheck::skip);
    p.regime = regime_from_string(f[12]);
    if (f[13] != "-") {
      p.has_seed = true;
      p.seed = to_u64(f[13], "seed");
    }
    p.tau = to_real(f[15], "tau");
    p.tau_censored = f[16] == "1";
    p.tau_D = to_real(f[17], "tau_D");
    p.tau_D_censored = f[18] == "1";
    p.baseline_horizon = to_real(f[19], "baseline_horizon");
    p.bound = BoundTerms{to_real(f[20], "bound_transport"), to_real(f[21], "bound_equilibration"),
                         to_real(f[22], "bound_reaction")};
    p.error = f[24];
    r.points.push_back(std::move(p));
  }
  return r;
}

ScalingFit fit_scaling(const std::vector<PointResult>& points, LRegime regime,
                       std::size_t min_points) {
  ScalingFit fit;
  fit.regime = regime;
  std::vector<const PointResult*> used;
  for (const PointResult& p : points) {
    if (!p.ok() || p.regime != regime) continue;
    if (p.tau_censored) {
      ++fit.censored;
      continue;
    }
    used.push_back(&p);
  }
  if (used.empty() && fit.censored > 0) {
    throw ConfigError(std::string("every point of regime '") + to_string(regime) + "' is censored");
  }
  if (used.size() < min_points) {
    throw ConfigError(std::string("regime '") + to_string(regime) + "' has " +
                      std::to_string(used.size()) + " uncensored points, need " +
                      std::to_string(min_points));
  }
  for (const PointResult* p : used) {
    const double b = p->bound.total();
    fit.rows.push_back(ScalingRow{p->index, p->params.L, p->tau, b, p->tau / b, 0.0});
    fit.C = std::max(fit.C, p->tau / b);
  }
  for (ScalingRow& row : fit.rows) row.residual = fit.C * row.bound - row.tau;

  using Key = std::tuple<double, double, double, double, double, double, double, bool,
                         std::uint64_t>;
  std::map<Key, std::vector<const PointResult*>> groups;
  for (const PointResult* p : used) {
    const Params& q = p->params;
    groups[Key{q.chi, q.v0, q.eps, q.theta, q.sigma, q.M0, q.delta0, p->has_seed, p->seed}]
        .push_back(p);
  }
  const std::vector<const PointResult*>* best = nullptr;
  std::size_t best_distinct = 1;
  for (const auto& [key, members] : groups) {
    std::vector<double> Ls;
    for (const PointResult* p : members) Ls.push_back(p->params.L);
    std::sort(Ls.begin(), Ls.end());
    const auto distinct =
        static_cast<std::size_t>(std::unique(Ls.begin(), Ls.end()) - Ls.begin());
    if (distinct > best_distinct) {
      best_distinct = distinct;
      best = &members;
    }
  }
  if (best) {
    std::vector<double> Ls, taus;
    for (const PointResult* p : *best) {
      Ls.push_back(p->params.L);
      taus.push_back(p->tau);
    }
    fit.slope = offset_slope(Ls, taus, 0.0);
  }
  return fit;
}

double offset_slope(const std::vector<double>& L, const std::vector<double>& tau, double offset) {
  if (L.size() != tau.size() || L.size() < 2) {
    throw DomainError("offset_slope needs at least two (L, tau) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(L.size());
  for (std::size_t k = 0; k < L.size(); ++k) {
    if (!(tau[k] > offset) || !(L[k] > 0.0)) {
      throw DomainError("offset_slope needs tau > offset and L > 0 at every point");
    }
    const double x = std::log(L[k]);
    const double y = std::log(tau[k] - offset);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw DomainError("offset_slope needs two distinct L values");
  return (n * sxy - sx * sy) / den;
}

void write_fit_csv(const std::string& path, const std::vector<ScalingFit>& fits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "regime,C,slope,censored,index,L,tau,bound,ratio,residual\n";
  for (const ScalingFit& f : fits) {
    for (const ScalingRow& r : f.rows) {
      out << to_string(f.regime) << "," << fmt(f.C) << "," << fmt(f.slope) << "," << f.censored
          << "," << r.index << "," << fmt(r.L) << "," << fmt(r.tau) << "," << fmt(r.bound) << ","
          << fmt(r.ratio) << "," << fmt(r.residual) << "\n";
    }
  }
}

std::vector<RiskyRow> risky_reaction_report(const std::vector<PointResult>& points) {
  std::vector<RiskyRow> rows;
  for (const PointResult& p : points) {
    if (!p.has_baseline() || p.tau_censored) continue;
    RiskyRow r;
    r.index = p.index;
    r.M0_eps = p.params.M0 * p.params.eps;
    r.tau = p.tau;
    r.tau_D = p.tau_D;
    r.ratio = p.tau_D / p.tau;
    r.censored = p.tau_D_censored;
    r.risky = r.M0_eps <= 0.2;
    rows.push_back(r);
  }
  return rows;
}

std::string summarize(const SweepResult& r, const std::vector<ScalingFit>& fits,
                      const std::vector<RiskyRow>& risky) {
  std::ostringstream os;
  std::size_t failed = 0, censored = 0;
  for (const PointResult& p : r.points) {
    failed += !p.ok();
    censored += p.ok() && p.tau_censored;
  }
  os << "points: " << r.points.size() << " (failed " << failed << ", censored " << censored
     << ")\n";
  for (const ScalingFit& f : fits) {
    os << "regime " << to_string(f.regime) << ": C = " << fmt(f.C) << " over " << f.rows.size()
       << " points";
    if (!std::isnan(f.slope)) os << ", log-log slope of tau vs L = " << fmt(f.slope);
    os << "\n";
  }
  if (!risky.empty()) {
    os << "baseline comparison (tau_D / tau):\n";
    for (const RiskyRow& row : risky) {
      os << "  point " << row.index << ": M0 eps = " << fmt(row.M0_eps) << ", tau = "
         << fmt(row.tau) << ", tau_D " << (row.censored ? ">= " : "= ") << fmt(row.tau_D)
         << ", ratio " << (row.censored ? ">= " : "= ") << fmt(row.ratio)
         << (row.risky ? " (risky)" : "") << "\n";
    }
  }
  return os.str();
}

}  // namespace fluxchemo
