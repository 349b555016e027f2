#include "fluxchemo/potential.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fluxchemo/cutoff.hpp"
#include "fluxchemo/errors.hpp"

namespace fluxchemo {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}  // namespace

double PotentialH::Cubic::value(double r) const {
  const double w = b - a;
  const double s = (r - a) / w;
  if (linear) return y0 + (y1 - y0) * s;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * w * m0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * w * m1;
}

double PotentialH::Cubic::integral_from_a(double r) const {
  const double w = b - a;
  const double s = (r - a) / w;
  if (linear) return w * (y0 * s + 0.5 * (y1 - y0) * s * s);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s3 * s;
  return w * ((0.5 * s4 - s3 + s) * y0 + (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2) * w * m0 +
              (-0.5 * s4 + s3) * y1 + (0.25 * s4 - s3 / 3.0) * w * m1);
}

PotentialH PotentialH::build(const Params& p) {
  if (!(p.R0 > 1.0)) throw RegimeError("build_potential: R0 = gamma/(2 v0) - 1 must exceed 1");
  if (!(p.R0 - 1.0 > 1.0)) {
    throw RegimeError("build_potential: R0 - 1 must exceed 1 so the -v0 branch is nonempty");
  }
  PotentialH pot;
  pot.gamma_ = p.gamma;
  pot.v0_ = p.v0;
  pot.R0_ = p.R0;
  pot.r0_ = p.r0;
  const double g = p.gamma;
  const double v0 = p.v0;
  const double R0 = p.R0;

  pot.eta1_ = Cubic{R0 - 1.0, R0, -v0, -g / (4.0 * R0), 0.0, g / (4.0 * R0 * R0), false};
  // The Hermite bridge must stay in [-v0, min(-gamma/(4r), -v0/2)]; fall back
  // to the straight chord (always admissible) otherwise.
  for (int k = 0; k <= 2000; ++k) {
    const double r = R0 - 1.0 + k / 2000.0;
    const double e = pot.eta1_.value(r);
    if (e < -v0 - 1e-14 || e > -g / (4.0 * r) + 1e-14 || e > -0.5 * v0 + 1e-14) {
      pot.eta1_.linear = true;
      pot.eta1_linear_ = true;
      break;
    }
  }
  pot.eta2_ = Cubic{p.r0, 1.0, v0, -v0, 0.0, 0.0, false};

  pot.H_R0_ = -0.25 * g * std::log(R0);
  pot.H_R0m1_ = pot.H_R0_ - pot.eta1_.integral_from_a(R0);
  pot.H_1_ = pot.H_R0m1_ + v0 * (R0 - 2.0);
  pot.H_r0_ = pot.H_1_ - pot.eta2_.integral_from_a(1.0);
  return pot;
}

PotentialH PotentialH::flat() {
  PotentialH pot;
  pot.flat_ = true;
  return pot;
}

PotentialH build_potential(const Params& p) { return PotentialH::build(p); }

double PotentialH::eta1(double r) const { return eta1_.value(r); }
double PotentialH::eta2(double r) const { return eta2_.value(r); }

double PotentialH::dH(double r) const {
  if (flat_) return 0.0;
  if (r > R0_) return -gamma_ / (4.0 * r);
  if (r >= R0_ - 1.0) return eta1_.value(r);
  if (r > 1.0) return -v0_;
  if (r > r0_) return eta2_.value(r);
  return v0_;
}

double PotentialH::H(double r) const {
  if (flat_) return 0.0;
  if (r > R0_) return -0.25 * gamma_ * std::log(r);
  if (r >= R0_ - 1.0) return H_R0m1_ + eta1_.integral_from_a(r);
  if (r > 1.0) return H_R0m1_ + v0_ * (R0_ - 1.0 - r);
  if (r > r0_) return H_r0_ + eta2_.integral_from_a(r);
  return H_r0_ - v0_ * (r0_ - r);
}

Grid2D family_grid(int n) { return Grid2D(n, 1.0); }

namespace {

double overlap_fraction(const Grid2D& grid, int i, int j, double cx, double cy, double radius) {
  const double h = grid.h();
  const double x = grid.center(i) - cx;
  const double y = grid.center(j) - cy;
  return disk_rect_overlap(radius, x - h / 2, x + h / 2, y - h / 2, y + h / 2) / (h * h);
}

// splitmix64 step; uniform doubles built from the top 53 bits.
struct Rng {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
};

}  // namespace

Field2D full_ball_density(double theta, const Grid2D& grid) {
  Field2D g(grid);
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) g(i, j) = 2.0 * theta * overlap_fraction(grid, i, j, 0, 0, 1.0);
  }
  return g;
}

Field2D case2_extremal_density(double theta, double r, const Grid2D& grid, double angle) {
  if (!(r > std::numbers::sqrt2 - 1.0 && r <= 1.0)) {
    throw DomainError("case2_extremal_density needs sqrt2 - 1 < r <= 1");
  }
  Field2D g(grid);
  const double off = r - kInvSqrt2;
  const double cx = off * std::cos(angle);
  const double cy = off * std::sin(angle);
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      const double ball = overlap_fraction(grid, i, j, 0, 0, 1.0);
      const double hole = overlap_fraction(grid, i, j, cx, cy, kInvSqrt2);
      g(i, j) = 2.0 * theta * std::max(ball - hole, 0.0);
    }
  }
  return g;
}

std::vector<Field2D> random_family_members(double theta, const Grid2D& grid, int count,
                                           std::uint64_t seed) {
  Rng rng{seed};
  const std::size_t ncell = grid.size();
  std::vector<double> frac(ncell);
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) frac[grid.index(i, j)] = overlap_fraction(grid, i, j, 0, 0, 1.0);
  }
  std::vector<Field2D> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const int nbumps = 1 + static_cast<int>(rng.next() % 4);
    struct Bump {
      double x, y, w, amp;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < nbumps; ++b) {
      const double rad = std::sqrt(rng.uniform(0.0, 1.0));
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      bumps.push_back({rad * std::cos(ang), rad * std::sin(ang), rng.uniform(0.1, 0.6),
                       rng.uniform(-1.0, 2.0)});
    }
    std::vector<double> raw(ncell, 0.0);
    for (int j = 0; j < grid.n; ++j) {
      for (int i = 0; i < grid.n; ++i) {
        double s = 0.0;
        for (const Bump& b : bumps) {
          const double dx = grid.center(i) - b.x;
          const double dy = grid.center(j) - b.y;
          s += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.w * b.w));
        }
        raw[grid.index(i, j)] = s;
      }
    }
    const double target = theta * kPi * rng.uniform(1.0 + 1e-6, 2.0 - 1e-6);
    auto build = [&](double shift) {
      Field2D g(grid);
      for (std::size_t c = 0; c < ncell; ++c) {
        g.data[c] = 2.0 * theta * frac[c] * std::clamp(raw[c] + shift, 0.0, 1.0);
      }
      return g;
    };
    double lo = -10.0;
    double hi = 10.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (build(mid).integral() < target ? lo : hi) = mid;
    }
    out.push_back(build(hi));
  }
  return out;
}

std::vector<Field2D> domination_test_set(double theta, const Grid2D& grid, int n_random,
                                         std::uint64_t seed) {
  std::vector<Field2D> out;
  out.push_back(full_ball_density(theta, grid));
  const double lo = std::numbers::sqrt2 - 1.0;
  for (int k = 0; k < 10; ++k) {
    const double r = lo + (1.0 - lo) * (k + 1) / 10.0;
    out.push_back(case2_extremal_density(theta, r, grid, 0.3 * k));
  }
  std::vector<Field2D> rnd = random_family_members(theta, grid, n_random, seed);
  out.insert(out.end(), std::make_move_iterator(rnd.begin()), std::make_move_iterator(rnd.end()));
  return out;
}

std::string family_violation(const Field2D& g, const DensityFamilySpec& family) {
  const Grid2D& grid = g.grid;
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      const double v = g(i, j);
      if (v < 0.0) return "negative density";
      const double cap = family.cap() * overlap_fraction(grid, i, j, 0, 0, 1.0);
      if (v > cap * (1.0 + 1e-12) + 1e-15) {
        std::ostringstream os;
        os << "density exceeds cap (or support) at cell (" << i << ", " << j << ")";
        return os.str();
      }
    }
  }
  const double mass = g.integral();
  if (mass < family.mass_lo() * (1.0 - 1e-9) || mass > family.mass_hi() * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "mass " << mass << " outside [" << family.mass_lo() << ", " << family.mass_hi() << "]";
    return os.str();
  }
  return {};
}

std::vector<double> log_radius_grid(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int k = 0; k < n; ++k) {
    r[k] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  }
  return r;
}

DominationReport verify_domination(const PotentialH& pot, const Params& p,
                                   const std::vector<Field2D>& samples,
                                   const std::vector<double>& r_grid, int n_angles,
                                   double tolerance) {
  const DensityFamilySpec family{p.theta};
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (auto why = family_violation(samples[k], family); !why.empty()) {
      throw std::invalid_argument("sample " + std::to_string(k) + " is not in the family: " + why);
    }
  }
  for (double r : r_grid) {
    if (!(r > p.r0 * (1.0 + 1e-3) * (1.0 - 1e-12))) {
      throw std::invalid_argument("verify_domination: radii must exceed r0 (1 + 1e-3)");
    }
  }
  const Cutoff psi(p);
  DominationReport report;
  report.tolerance = tolerance;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const SourceCells sources(samples[k]);
    for (double r : r_grid) {
      double worst = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < n_angles; ++a) {
        const double phi = 2.0 * kPi * a / n_angles;
        const double nx = std::cos(phi);
        const double ny = std::sin(phi);
        const auto gc = sources.grad_c(r * nx, r * ny, p.sigma);
        worst = std::max(worst, capped_normal_drift(gc[0], gc[1], nx, ny, psi));
      }
      DominationRow row{r, static_cast<int>(k), pot.dH(r), worst, pot.dH(r) - worst};
      if (row.margin < -tolerance) ++report.violations;
      report.worst_margin = std::min(report.worst_margin, row.margin);
      report.rows.push_back(row);
    }
  }
  if (report.rows.empty()) report.worst_margin = 0.0;
  return report;
}

}  // namespace fluxchemo
