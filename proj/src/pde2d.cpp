#include "fluxchemo/pde2d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fluxchemo/errors.hpp"
#include "fluxchemo/quadrature.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace fluxchemo {

namespace {

constexpr double kPi = std::numbers::pi;

// Explicit diffusion fills the far field with subnormals, which are very slow
// on x86. Flushing them changes masses by < 1e-300 per cell.
class FlushDenormals {
 public:
  FlushDenormals() {
#if defined(__SSE2__)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040);
#endif
  }
  ~FlushDenormals() {
#if defined(__SSE2__)
    _mm_setcsr(saved_);
#endif
  }

 private:
  unsigned saved_ = 0;
};

long double sum_of(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s;
}

// Exact solution of the local pair r1' = r2' = -eps r1 r2 over dt; returns the
// amount removed from each species. r1 - r2 is conserved, which gives a
// closed form in terms of expm1.
double reaction_increment(double r1, double r2, double eps_dt) {
  if (r1 <= 0.0 || r2 <= 0.0 || eps_dt <= 0.0) return 0.0;
  const double x = eps_dt * (r1 - r2);
  const double phi = x == 0.0 ? 1.0 : std::expm1(x) / x;
  const double next = r2 / (1.0 + r1 * eps_dt * phi);
  return std::clamp(r2 - next, 0.0, std::min(r1, r2));
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_raw(const std::string& path, const std::vector<double>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::vector<double> read_raw(const std::string& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
    throw ConfigError("short array file " + path);
  }
  return data;
}

struct Header {
  std::vector<long> shape;
  double spacing = 0.0;
  double half_width = 0.0;
  double time = 0.0;
};

Header read_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  Header hdr;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "shape") {
      long v;
      while (ls >> v) hdr.shape.push_back(v);
    } else if (key == "spacing") {
      ls >> hdr.spacing;
    } else if (key == "half_width") {
      ls >> hdr.half_width;
    } else if (key == "time") {
      ls >> hdr.time;
    }
  }
  return hdr;
}

void write_header(const std::string& path, const std::vector<long>& shape, double spacing,
                  double half_width, double t) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  char buf[64];
  out << "shape";
  for (long s : shape) out << ' ' << s;
  out << "\ndtype float64-le\n";
  std::snprintf(buf, sizeof buf, "%.17g", spacing);
  out << "spacing " << buf << '\n';
  if (half_width > 0.0) {
    std::snprintf(buf, sizeof buf, "%.17g", half_width);
    out << "half_width " << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", t);
  out << "time " << buf << '\n';
}

}  // namespace

// ---------------------------------------------------------------- run loop

StopPredicate stop_at_half_mass(double theta) {
  const double level = kPi * theta;
  return [level](const Diagnostics& d) { return !d.mass2.empty() && d.mass2.back() <= level; };
}

Diagnostics run(Simulation& sim, const RunConfig& cfg, const StopPredicate& stop) {
  Diagnostics d;
  d.probe_radii = cfg.probes;
  if (!(cfg.T_max > 0.0)) return d;

  const auto wall_start = std::chrono::steady_clock::now();
  long double cumulative = 0.0L;
  auto record = [&] {
    d.times.push_back(sim.time());
    d.mass1.push_back(sim.mass1());
    d.mass2.push_back(sim.mass2());
    d.h.push_back(sim.reaction_rate());
    d.cumulative_h.push_back(static_cast<double>(cumulative));
    std::vector<double> m;
    m.reserve(cfg.probes.size());
    for (double r : cfg.probes) m.push_back(sim.local_mass(r));
    d.M_probe.push_back(std::move(m));
  };

  record();
  const double m2_initial = d.mass2.front();
  d.conservation_abs =
      cfg.conservation_ulps * std::numeric_limits<double>::epsilon() * d.mass1.front();
  if (stop && stop(d)) {
    d.stopped = true;
    return d;
  }
  double last_t = sim.time();
  double last_m2 = m2_initial;
  const double t_end = sim.time() + cfg.T_max;

  while (sim.time() < t_end) {
    double dt = cfg.dt > 0.0 ? cfg.dt : cfg.dt_safety * sim.max_dt();
    dt = std::min(dt, t_end - sim.time());
    if (!(dt > 0.0)) break;

    StepDelta s;
    try {
      s = sim.step(dt);
    } catch (const NumericalError&) {
      if (!cfg.dump_dir.empty()) sim.dump(cfg.dump_dir, "nan");
      throw;
    }
    ++d.steps;
    cumulative += s.reaction;
    const double mismatch = std::abs(s.dm1 - s.dm2);
    d.worst_step_mismatch = std::max(d.worst_step_mismatch, mismatch);
    if (mismatch > cfg.conservation_rel * std::abs(s.dm2) + d.conservation_abs) {
      ++d.conservation_failures;
    }
    if (cfg.log_steps) d.step_log.push_back(s);

    const double m2 = sim.mass2();
    const bool due = sim.time() - last_t >= cfg.record_every * (1.0 - 1e-12) ||
                     std::abs(m2 - last_m2) >= cfg.record_mass2_change * m2_initial ||
                     sim.time() >= t_end;
    if (due) {
      record();
      last_t = sim.time();
      last_m2 = m2;
      if (stop && stop(d)) {
        d.stopped = true;
        break;
      }
    }
    if (cfg.wall_budget > 0.0) {
      const double used =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
      if (used > cfg.wall_budget) {
        d.budget_exceeded = true;
        if (d.times.back() != sim.time()) record();
        break;
      }
    }
  }
  if (d.times.back() != sim.time()) record();
  return d;
}

double half_time(const Diagnostics& diag, double theta) {
  const double level = kPi * theta;
  const auto& m = diag.mass2;
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (m[k] > m[k - 1]) {
      std::ostringstream os;
      os << "mass2 increases between t = " << diag.times[k - 1] << " and t = " << diag.times[k];
      throw NumericalError(os.str());
    }
  }
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] <= level) {
      if (k == 0) return diag.times[0];
      const double w = (m[k - 1] - level) / (m[k - 1] - m[k]);
      return diag.times[k - 1] + w * (diag.times[k] - diag.times[k - 1]);
    }
  }
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- planar

double local_mass(const Field2D& rho, double r) {
  const Grid2D& g = rho.grid;
  if (std::isinf(r) && r > 0) return rho.integral();
  if (!(r >= 0.0)) throw DomainError("local_mass: negative radius");
  if (r > g.half_width * std::numbers::sqrt2 * (1.0 + 1e-12)) {
    throw DomainError("local_mass: radius beyond the grid");
  }
  const double h = g.h();
  long double acc = 0.0L;
  for (int j = 0; j < g.n; ++j) {
    const double y0 = g.center(j) - h / 2;
    const double y1 = y0 + h;
    const double ny = std::max({0.0, y0, -y1});
    const double fy = std::max(std::abs(y0), std::abs(y1));
    for (int i = 0; i < g.n; ++i) {
      const double v = rho(i, j);
      if (v == 0.0) continue;
      const double x0 = g.center(i) - h / 2;
      const double x1 = x0 + h;
      const double nx = std::max({0.0, x0, -x1});
      if (nx * nx + ny * ny >= r * r) continue;
      const double fx = std::max(std::abs(x0), std::abs(x1));
      const double area =
          fx * fx + fy * fy <= r * r ? h * h : disk_rect_overlap(r, x0, x1, y0, y1);
      acc += static_cast<long double>(v) * area;
    }
  }
  return static_cast<double>(acc);
}

PlanarSimulation::PlanarSimulation(const Params& p, const InitialData& init, PlanarOptions opt)
    : PlanarSimulation(p, init.rho1, init.rho2, opt.chemotaxis ? Cutoff(p) : Cutoff::none(),
                       opt) {}

PlanarSimulation::PlanarSimulation(const Params& p, const Field2D& rho1, const Field2D& rho2,
                                   const Cutoff& psi, PlanarOptions opt)
    : params_(p), psi_(psi), opt_(opt) {
  if (!(rho1.grid == rho2.grid)) throw ConfigError("rho1 and rho2 grids differ");
  state_.rho1 = rho1;
  state_.rho2 = rho2;
  const Grid2D& g = rho1.grid;
  state_.drift = DriftField{Field2D(g), Field2D(g), Field2D(g), Field2D(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (rho2.data[k] < 0.0 || rho1.data[k] < 0.0) throw ConfigError("negative initial density");
    if (rho2.data[k] > 0.0) support_.push_back(k);
  }
  if (!psi_.is_zero()) gradient_ = std::make_unique<PlanarGradient>(g);
  flux_.resize(g.size());
  refresh_drift(true);
}

PlanarSimulation::~PlanarSimulation() = default;

void PlanarSimulation::refresh_drift(bool force) {
  if (psi_.is_zero()) return;
  const double m2 = mass2();
  const bool stale = opt_.exact_recompute ||
                     std::abs(m2 - mass2_at_drift_) > opt_.recompute_tol * mass2_at_drift_;
  if (!force && !stale) return;
  GradC grad = (*gradient_)(state_.rho2, params_.sigma);
  touches_boundary_ = grad.support_touches_boundary;
  state_.drift = assemble_drift(std::move(grad), psi_);
  mass2_at_drift_ = m2;
  ++grad_evals_;
}

double PlanarSimulation::max_dt() const {
  const double h = state_.rho1.grid.h();
  double dt = 0.25 * h * h / (1.0 + psi_.v0() * h / 2.0);
  double r2max = 0.0;
  for (std::size_t k : support_) r2max = std::max(r2max, state_.rho2.data[k]);
  if (params_.eps > 0.0 && r2max > 0.0) dt = std::min(dt, 0.5 / (params_.eps * r2max));
  return dt;
}

StepDelta PlanarSimulation::step(double dt) {
  const double limit = max_dt();
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the explicit limit " << limit;
    throw CflError(os.str(), 0.9 * limit);
  }
  FlushDenormals ftz;
  refresh_drift(false);

  const Grid2D& g = state_.rho1.grid;
  const int n = g.n;
  const double h = g.h();
  const double inv_h = 1.0 / h;
  const double k = dt / h;
  std::vector<double>& r = state_.rho1.data;
  std::vector<double>& r2 = state_.rho2.data;
  const std::vector<double>& bx = state_.drift.bx.data;
  const std::vector<double>& by = state_.drift.by.data;
  const bool drift = !psi_.is_zero();

  const long double m1_before = sum_of(r);
  const long double m2_before = sum_of(r2);

  std::vector<double>& next = flux_;
  next = r;
  for (int j = 0; j < n; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * n;
    for (int i = 0; i + 1 < n; ++i) {
      const std::size_t a = row + i;
      const std::size_t b = a + 1;
      double f = (r[a] - r[b]) * inv_h;
      if (drift) {
        const double u = 0.5 * (bx[a] + bx[b]);
        f += u > 0.0 ? u * r[a] : u * r[b];
      }
      next[a] -= k * f;
      next[b] += k * f;
    }
  }
  for (int j = 0; j + 1 < n; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * n;
    for (int i = 0; i < n; ++i) {
      const std::size_t a = row + i;
      const std::size_t b = a + n;
      double f = (r[a] - r[b]) * inv_h;
      if (drift) {
        const double u = 0.5 * (by[a] + by[b]);
        f += u > 0.0 ? u * r[a] : u * r[b];
      }
      next[a] -= k * f;
      next[b] += k * f;
    }
  }
  r.swap(next);

  long double removed = 0.0L;
  const double eps_dt = params_.eps * dt;
  for (std::size_t c : support_) {
    const double delta = reaction_increment(r[c], r2[c], eps_dt);
    r[c] -= delta;
    r2[c] -= delta;
    removed += delta;
  }
  state_.t += dt;

  if (!all_finite(r)) throw NumericalError("non-finite rho1 after step at t = " + std::to_string(state_.t));

  const double area = g.cell_area();
  StepDelta s;
  s.dm1 = static_cast<double>((sum_of(r) - m1_before) * area);
  s.dm2 = static_cast<double>((sum_of(r2) - m2_before) * area);
  s.reaction = static_cast<double>(removed * area);
  return s;
}

double PlanarSimulation::mass1() const {
  return static_cast<double>(sum_of(state_.rho1.data) * state_.rho1.grid.cell_area());
}

double PlanarSimulation::mass2() const {
  long double s = 0.0L;
  for (std::size_t k : support_) s += state_.rho2.data[k];
  return static_cast<double>(s * state_.rho2.grid.cell_area());
}

double PlanarSimulation::reaction_rate() const {
  long double s = 0.0L;
  for (std::size_t k : support_) {
    s += static_cast<long double>(state_.rho1.data[k]) * state_.rho2.data[k];
  }
  return static_cast<double>(params_.eps * s * state_.rho1.grid.cell_area());
}

double PlanarSimulation::local_mass(double r) const { return fluxchemo::local_mass(state_.rho1, r); }

void PlanarSimulation::dump(const std::string& dir, const std::string& tag) const {
  std::filesystem::create_directories(dir);
  write_field(join(dir, tag + "_rho1"), state_.rho1, state_.t);
  write_field(join(dir, tag + "_rho2"), state_.rho2, state_.t);
}

// ---------------------------------------------------------------- radial

RadialInitial make_radial_initial(const Params& p, double dr, double r_max) {
  if (!(dr > 0.0) || 2.0 / dr < 16.0 - 1e-9) {
    throw ResolutionError("radial grid too coarse: fewer than 16 cells across the unit ball");
  }
  if (r_max < p.L + 5.0 / p.v0 - 1e-12) throw ConfigError("radial grid must reach L + 5/v0");
  const auto n = static_cast<std::size_t>(std::ceil(r_max / dr - 1e-9));
  RadialInitial init{RadialProfile(dr, n), RadialProfile(dr, n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) * dr;
    const double b = a + dr;
    const double norm = 0.5 * (b * b - a * a);
    if (a < 1.0) {
      init.rho2.values[i] = 2.0 * p.theta *
                            integrate([&](double s) { return s * eta_plateau(s, p.delta0); }, a,
                                      b, 4, 8) /
                            norm;
    }
    if (b > 0.75 * p.L && a < p.L) {
      init.rho1.values[i] =
          integrate([&](double s) { return s * ring_shape(s, p.L); }, a, b, 4, 8) / norm;
    }
  }
  if (p.M0 > 0.0) {
    const double mass = init.rho1.disk_integral(init.rho1.r_max());
    if (!(mass > 0.0)) throw ResolutionError("rho1 profile not resolved by the radial grid");
    for (double& v : init.rho1.values) v *= p.M0 / mass;
  } else {
    std::fill(init.rho1.values.begin(), init.rho1.values.end(), 0.0);
  }
  return init;
}

RadialSimulation::RadialSimulation(const Params& p, const RadialInitial& init, bool chemotaxis)
    : RadialSimulation(p, init, chemotaxis ? Cutoff(p) : Cutoff::none()) {}

RadialSimulation::RadialSimulation(const Params& p, const RadialInitial& init, const Cutoff& psi)
    : params_(p), psi_(psi), rho1_(init.rho1), rho2_(init.rho2) {
  if (rho1_.size() != rho2_.size() || rho1_.dr != rho2_.dr) {
    throw ConfigError("rho1 and rho2 radial grids differ");
  }
  const std::size_t n = rho1_.size();
  const double dr = rho1_.dr;
  vol_.resize(n);
  for (std::size_t i = 0; i < n; ++i) vol_[i] = kPi * dr * dr * (2.0 * static_cast<double>(i) + 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rho2_.values[i] > 0.0) support_end_ = i + 1;
  }
  drift_.assign(n, 0.0);
  flux_.assign(n, 0.0);
  refresh_drift();
}

void RadialSimulation::refresh_drift() {
  if (psi_.is_zero()) return;
  const double dr = rho1_.dr;
  // 2 pi int_0^{r_f} s rho2 ds accumulated cell by cell; the face drift is
  // -Psi(|c_r|) with c_r = -enclosed / (2 pi sigma r_f) (inward pull).
  long double enclosed = 0.0L;
  for (std::size_t i = 0; i < drift_.size(); ++i) {
    if (i < support_end_) enclosed += static_cast<long double>(rho2_.values[i]) * vol_[i];
    const double rf = static_cast<double>(i + 1) * dr;
    const double grad = static_cast<double>(enclosed) / (2.0 * kPi * params_.sigma * rf);
    drift_[i] = -psi_(grad);
  }
}

double RadialSimulation::max_dt() const {
  const double dr = rho1_.dr;
  const std::size_t n = rho1_.size();
  double rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double out = 0.0;
    if (i + 1 < n) out += 2.0 * kPi * static_cast<double>(i + 1) * dr * (1.0 / dr + std::max(drift_[i], 0.0));
    if (i > 0) out += 2.0 * kPi * static_cast<double>(i) * dr * (1.0 / dr + std::max(-drift_[i - 1], 0.0));
    rate = std::max(rate, out / vol_[i]);
  }
  double dt = 1.0 / rate;
  double r2max = 0.0;
  for (std::size_t i = 0; i < support_end_; ++i) r2max = std::max(r2max, rho2_.values[i]);
  if (params_.eps > 0.0 && r2max > 0.0) dt = std::min(dt, 0.5 / (params_.eps * r2max));
  return dt;
}

StepDelta RadialSimulation::step(double dt) {
  const double limit = max_dt();
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the explicit limit " << limit;
    throw CflError(os.str(), 0.9 * limit);
  }
  FlushDenormals ftz;
  const std::size_t n = rho1_.size();
  const double dr = rho1_.dr;
  std::vector<double>& r = rho1_.values;
  std::vector<double>& r2 = rho2_.values;

  auto weighted = [&](const std::vector<double>& v) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(v[i]) * vol_[i];
    return s;
  };
  const long double m1_before = weighted(r);
  const long double m2_before = weighted(r2);

  std::vector<double>& next = flux_;
  next = r;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double u = drift_[i];
    double f = (r[i] - r[i + 1]) / dr;
    f += u > 0.0 ? u * r[i] : u * r[i + 1];
    const double moved = dt * f * 2.0 * kPi * static_cast<double>(i + 1) * dr;
    next[i] -= moved / vol_[i];
    next[i + 1] += moved / vol_[i + 1];
  }
  r.swap(next);

  long double removed = 0.0L;
  const double eps_dt = params_.eps * dt;
  for (std::size_t i = 0; i < support_end_; ++i) {
    const double delta = reaction_increment(r[i], r2[i], eps_dt);
    r[i] -= delta;
    r2[i] -= delta;
    removed += static_cast<long double>(delta) * vol_[i];
  }
  t_ += dt;
  if (!all_finite(r)) throw NumericalError("non-finite rho1 after step at t = " + std::to_string(t_));
  refresh_drift();

  StepDelta s;
  s.dm1 = static_cast<double>(weighted(r) - m1_before);
  s.dm2 = static_cast<double>(weighted(r2) - m2_before);
  s.reaction = static_cast<double>(removed);
  return s;
}

double RadialSimulation::mass1() const { return rho1_.disk_integral(rho1_.r_max()); }

double RadialSimulation::mass2() const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < support_end_; ++i) s += static_cast<long double>(rho2_.values[i]) * vol_[i];
  return static_cast<double>(s);
}

double RadialSimulation::reaction_rate() const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < support_end_; ++i) {
    s += static_cast<long double>(rho1_.values[i]) * rho2_.values[i] * vol_[i];
  }
  return static_cast<double>(params_.eps * s);
}

double RadialSimulation::local_mass(double r) const {
  if (std::isinf(r) && r > 0) return mass1();
  if (!(r >= 0.0)) throw DomainError("local_mass: negative radius");
  if (r > rho1_.r_max() * (1.0 + 1e-12)) throw DomainError("local_mass: radius beyond the grid");
  return rho1_.disk_integral(r);
}

void RadialSimulation::dump(const std::string& dir, const std::string& tag) const {
  std::filesystem::create_directories(dir);
  write_profile(join(dir, tag + "_rho1"), rho1_, t_);
  write_profile(join(dir, tag + "_rho2"), rho2_, t_);
}

// ---------------------------------------------------------------- files

void write_field(const std::string& base, const Field2D& f, double t) {
  write_raw(base + ".bin", f.data);
  write_header(base + ".hdr", {f.grid.n, f.grid.n}, f.grid.h(), f.grid.half_width, t);
}

Field2D read_field(const std::string& base, double* t) {
  const Header hdr = read_header(base + ".hdr");
  if (hdr.shape.size() != 2 || hdr.shape[0] != hdr.shape[1] || hdr.shape[0] <= 0) {
    throw ConfigError("bad field header " + base + ".hdr");
  }
  Field2D f(Grid2D(static_cast<int>(hdr.shape[0]), hdr.half_width));
  f.data = read_raw(base + ".bin", f.grid.size());
  if (t) *t = hdr.time;
  return f;
}

void write_profile(const std::string& base, const RadialProfile& f, double t) {
  write_raw(base + ".bin", f.values);
  write_header(base + ".hdr", {static_cast<long>(f.size())}, f.dr, 0.0, t);
}

RadialProfile read_profile(const std::string& base, double* t) {
  const Header hdr = read_header(base + ".hdr");
  if (hdr.shape.size() != 1 || hdr.shape[0] <= 0) throw ConfigError("bad profile header " + base + ".hdr");
  RadialProfile f(hdr.spacing, static_cast<std::size_t>(hdr.shape[0]));
  f.values = read_raw(base + ".bin", f.size());
  if (t) *t = hdr.time;
  return f;
}

void write_diagnostics_csv(const std::string& path, const Diagnostics& d) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  char buf[64];
  out << "t,mass1,mass2,h,cumulative_h";
  for (double r : d.probe_radii) {
    std::snprintf(buf, sizeof buf, "%.17g", r);
    out << ",M_r" << buf;
  }
  out << '\n';
  for (std::size_t k = 0; k < d.size(); ++k) {
    std::vector<double> row{d.times[k], d.mass1[k], d.mass2[k], d.h[k], d.cumulative_h[k]};
    row.insert(row.end(), d.M_probe[k].begin(), d.M_probe[k].end());
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace fluxchemo
