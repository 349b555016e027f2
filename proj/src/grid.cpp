#include "fluxchemo/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fluxchemo/errors.hpp"

namespace fluxchemo {

Grid2D::Grid2D(int n_, double half_width_) : n(n_), half_width(half_width_) {
  if (n <= 0 || !(half_width > 0.0)) throw ConfigError("grid needs n > 0 and half_width > 0");
}

double Field2D::integral() const {
  double s = 0.0;
  for (double v : data) s += v;
  return s * grid.cell_area();
}

double Field2D::max() const { return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end()); }

double Field2D::min() const { return data.empty() ? 0.0 : *std::min_element(data.begin(), data.end()); }

double RadialProfile::disk_integral(double r) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = static_cast<double>(i) * dr;
    if (a >= r) break;
    const double b = std::min(a + dr, r);
    acc += values[i] * (b * b - a * a);
  }
  return std::numbers::pi * acc;
}

namespace {

// int sqrt(R^2 - x^2) dx
double chord_antiderivative(double R, double x) {
  const double xr = std::clamp(x / R, -1.0, 1.0);
  const double xc = xr * R;
  return 0.5 * (xc * std::sqrt(std::max(R * R - xc * xc, 0.0)) + R * R * std::asin(xr));
}

}  // namespace

double disk_rect_overlap(double R, double x0, double x1, double y0, double y1) {
  if (R <= 0.0 || x1 <= x0 || y1 <= y0) return 0.0;
  const double a = std::max(x0, -R);
  const double b = std::min(x1, R);
  if (b <= a) return 0.0;

  // Breakpoints where the half chord s(x) crosses |y0| or |y1|.
  std::array<double, 8> pts{};
  std::size_t np = 0;
  pts[np++] = a;
  pts[np++] = b;
  for (double y : {y0, y1}) {
    if (std::abs(y) < R) {
      const double xb = std::sqrt(R * R - y * y);
      for (double x : {-xb, xb}) {
        if (x > a && x < b) pts[np++] = x;
      }
    }
  }
  std::sort(pts.begin(), pts.begin() + np);

  double area = 0.0;
  for (std::size_t k = 0; k + 1 < np; ++k) {
    const double u = pts[k];
    const double v = pts[k + 1];
    if (v <= u) continue;
    const double xm = 0.5 * (u + v);
    const double sm = std::sqrt(std::max(R * R - xm * xm, 0.0));
    // On this piece the clipping pattern is fixed; upper = min(y1, s), lower = max(y0, -s).
    const bool upper_is_s = sm < y1;
    const bool lower_is_s = -sm > y0;
    if (std::min(y1, sm) <= std::max(y0, -sm)) continue;
    const double S = chord_antiderivative(R, v) - chord_antiderivative(R, u);
    const double w = v - u;
    const double upper = upper_is_s ? S : y1 * w;
    const double lower = lower_is_s ? -S : y0 * w;
    area += upper - lower;
  }
  return std::max(area, 0.0);
}

}  // namespace fluxchemo
