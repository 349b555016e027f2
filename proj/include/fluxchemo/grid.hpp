#pragma once

#include <cstddef>
#include <vector>

namespace fluxchemo {

/// Uniform square grid of n x n cells on [-half_width, half_width]^2.
struct Grid2D {
  int n = 0;
  double half_width = 0.0;

  Grid2D() = default;
  Grid2D(int n, double half_width);

  double h() const { return 2.0 * half_width / n; }
  double cell_area() const { return h() * h(); }
  /// Cell-center coordinate along either axis.
  double center(int i) const { return -half_width + (i + 0.5) * h(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }

  bool operator==(const Grid2D&) const = default;
};

/// Scalar density sampled as cell averages on a Grid2D; data[j*n + i] is the
/// cell with x-index i and y-index j.
struct Field2D {
  Grid2D grid;
  std::vector<double> data;

  Field2D() = default;
  explicit Field2D(const Grid2D& g, double fill = 0.0) : grid(g), data(g.size(), fill) {}

  double& operator()(int i, int j) { return data[grid.index(i, j)]; }
  double operator()(int i, int j) const { return data[grid.index(i, j)]; }

  /// Integral over the grid (cell sum times cell area).
  double integral() const;
  double max() const;
  double min() const;
};

/// Function of r >= 0 stored as cell averages on [0, r_max) with uniform dr;
/// cell i covers [i dr, (i+1) dr).
struct RadialProfile {
  double dr = 0.0;
  std::vector<double> values;

  RadialProfile() = default;
  RadialProfile(double dr, std::size_t n, double fill = 0.0) : dr(dr), values(n, fill) {}

  std::size_t size() const { return values.size(); }
  double r_max() const { return dr * static_cast<double>(values.size()); }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dr; }
  /// Planar integral 2*pi * int_0^r s f(s) ds of the piecewise-constant profile.
  double disk_integral(double r) const;
};

/// Exact area of the intersection of the disk |x| <= radius (centered at the
/// origin) with the axis-aligned rectangle [x0, x1] x [y0, y1].
double disk_rect_overlap(double radius, double x0, double x1, double y0, double y1);

}  // namespace fluxchemo
