#include "fluxchemo/initial.hpp"

#include <algorithm>
#include <cmath>

#include "fluxchemo/errors.hpp"

namespace fluxchemo {

const char* to_string(Rho1Kind k) {
  return k == Rho1Kind::radial_ring ? "radial-ring" : "offset-bump";
}

Rho1Kind rho1_kind_from_string(const std::string& s) {
  if (s == "radial-ring") return Rho1Kind::radial_ring;
  if (s == "offset-bump") return Rho1Kind::offset_bump;
  throw ConfigError("unknown rho1 kind '" + s + "' (expected radial-ring or offset-bump)");
}

namespace {

// C-infinity step: 0 at s <= 0, 1 at s >= 1.
double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double mollifier(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

}  // namespace

double eta_plateau(double r, double delta0) {
  if (r <= 1.0 - delta0) return 1.0;
  if (r >= 1.0) return 0.0;
  return smooth_step((1.0 - r) / delta0);
}

double ring_shape(double r, double L) { return mollifier((r - 0.875 * L) / (0.125 * L)); }

double bump_shape(double dist, double radius) { return mollifier(dist / radius); }

double default_half_width(const Params& p) {
  return std::max({2.0 * p.L, 8.0 / p.v0, p.L + 5.0 / p.v0});
}

Grid2D default_grid(const Params& p, int cells_per_unit) {
  const double hw = default_half_width(p);
  const int n = static_cast<int>(std::ceil(2.0 * hw * cells_per_unit));
  return Grid2D(n, n / (2.0 * cells_per_unit));
}

Field2D make_rho2(const Params& p, const Grid2D& grid) {
  Field2D rho2(grid);
  const double h = grid.h();
  constexpr int kSub = 8;
  for (int j = 0; j < grid.n; ++j) {
    const double y = grid.center(j);
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.center(i);
      const double near = std::hypot(std::max(std::abs(x) - h / 2, 0.0),
                                     std::max(std::abs(y) - h / 2, 0.0));
      if (near >= 1.0) continue;
      const double far = std::hypot(std::abs(x) + h / 2, std::abs(y) + h / 2);
      double avg;
      if (far <= 1.0 - p.delta0) {
        avg = 1.0;
      } else {
        double s = 0.0;
        for (int b = 0; b < kSub; ++b) {
          for (int a = 0; a < kSub; ++a) {
            const double xs = x - h / 2 + (a + 0.5) * h / kSub;
            const double ys = y - h / 2 + (b + 0.5) * h / kSub;
            s += eta_plateau(std::hypot(xs, ys), p.delta0);
          }
        }
        avg = s / (kSub * kSub);
      }
      rho2(i, j) = 2.0 * p.theta * avg;
    }
  }
  return rho2;
}

InitialData make_initial(const Params& p, Rho1Kind kind, const Grid2D& grid, double bump_angle) {
  if (2.0 / grid.h() < 16.0 - 1e-9) {
    throw ResolutionError("grid too coarse: fewer than 16 cells across the unit ball");
  }
  if (grid.half_width < p.L + 5.0 / p.v0 - 1e-12) {
    throw ConfigError("grid must cover B(0, L + 5/v0)");
  }

  InitialData init;
  init.rho1_kind = kind;
  init.rho2 = make_rho2(p, grid);
  init.rho1 = Field2D(grid);
  if (p.M0 == 0.0) return init;

  const double cx = 0.75 * p.L * std::cos(bump_angle);
  const double cy = 0.75 * p.L * std::sin(bump_angle);
  for (int j = 0; j < grid.n; ++j) {
    const double y = grid.center(j);
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.center(i);
      init.rho1(i, j) = kind == Rho1Kind::radial_ring
                            ? ring_shape(std::hypot(x, y), p.L)
                            : bump_shape(std::hypot(x - cx, y - cy), 0.25 * p.L);
    }
  }
  const double mass = init.rho1.integral();
  if (!(mass > 0.0)) throw ResolutionError("rho1 profile not resolved by the grid");
  for (double& v : init.rho1.data) v *= p.M0 / mass;
  return init;
}

}  // namespace fluxchemo
