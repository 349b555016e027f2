#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "fluxchemo/cutoff.hpp"
#include "fluxchemo/grid.hpp"

namespace fluxchemo {

/// Admissible attractant densities: supported in the unit ball, capped at
/// 2 theta, mass in [pi theta, 2 pi theta].
struct DensityFamilySpec {
  double theta = 1.0;

  double cap() const { return 2.0 * theta; }
  double mass_lo() const;
  double mass_hi() const;
};

/// Radial derivative of c for radial rho2 with -sigma Lap c = rho2:
/// -(1/(sigma r)) int_0^r s rho2(s) ds. Returns 0 at r = 0.
double grad_c_radial(const RadialProfile& rho2, double r, double sigma);

/// Same for a callable profile supported in [0, support]; composite
/// Gauss-Legendre quadrature.
double grad_c_radial(const std::function<double(double)>& rho2, double r, double sigma,
                     double support = 1.0);

/// x-derivative at (r, 0) of the free-space inverse Laplacian of a unit point
/// mass at (x, y). Throws DomainError at (r, 0).
double influence_V(double x, double y, double r);

/// Integral over the square of side h centered at (dx, dy) of the 2D gradient
/// kernel -(1/2pi) D/|D|^2. Exact (analytic) within `exact_radius` cells of the
/// origin, 2x2 Gauss beyond.
std::array<double, 2> cell_gradient_kernel(double dx, double dy, double h,
                                           double exact_radius_cells = 64.0);

struct GradC {
  Field2D gx;
  Field2D gy;
  /// rho2 was nonzero in the outermost ring of cells.
  bool support_touches_boundary = false;
};

/// Free-space grad c by FFT convolution on a zero-padded doubled grid.
/// Not copyable; each instance owns its own transform buffers.
class PlanarGradient {
 public:
  explicit PlanarGradient(const Grid2D& grid);
  ~PlanarGradient();
  PlanarGradient(const PlanarGradient&) = delete;
  PlanarGradient& operator=(const PlanarGradient&) = delete;

  GradC operator()(const Field2D& rho2, double sigma) const;
  const Grid2D& grid() const { return grid_; }

 private:
  struct Impl;
  Grid2D grid_;
  std::unique_ptr<Impl> impl_;
};

/// Direct O(N^4) convolution with the same cell kernel (reference for tests).
GradC grad_c_direct(const Field2D& rho2, double sigma);

/// Nonzero cells of a cell-averaged density, for repeated point evaluations
/// of grad c by direct summation.
class SourceCells {
 public:
  explicit SourceCells(const Field2D& g);

  /// Analytic cell integral within 8 cells of the point, 2x2 Gauss within 32,
  /// midpoint beyond.
  std::array<double, 2> grad_c(double px, double py, double sigma) const;

 private:
  struct Cell {
    double x, y, rho;
  };
  double h_ = 0.0;
  std::vector<Cell> cells_;
};

/// grad c at an arbitrary point from cell-averaged g (direct sum).
std::array<double, 2> grad_c_at(const Field2D& g, double sigma, double px, double py);

/// Drift b = (grad c/|grad c|) Psi(|grad c|) at cell centers, plus raw grad c.
struct DriftField {
  Field2D bx;
  Field2D by;
  Field2D gx;
  Field2D gy;
};

DriftField assemble_drift(GradC grad, const Cutoff& psi);

/// Radial component of the capped drift for a given grad c and outward normal.
double capped_normal_drift(double gx, double gy, double nx, double ny, const Cutoff& psi);

/// sup over the family of (1/sigma) int g V(., .; r).
///
/// For sqrt2-1 < r <= 1 returns the closed form -(theta/sigma)(r - 1/sqrt2)
/// (theta/sigma = gamma/chi). For r > 1 evaluates the optimal level-set
/// configuration (mass pi theta where V is largest) semi-analytically.
/// Throws DomainError for r <= sqrt2 - 1.
double extremal_drift(double r, const DensityFamilySpec& family, double sigma);

/// Greedy oracle on a polar discretization of B(0,1): fill cells in decreasing
/// V order at density 2 theta until the mass reaches pi theta.
/// Throws ResolutionError if a single cell holds more than pi theta / 100.
double brute_force_extremal(double r, const DensityFamilySpec& family, double sigma,
                            int n_radial = 400, int n_angular = 1600);

struct ExtremalComparison {
  std::vector<double> r;
  std::vector<double> closed;
  std::vector<double> oracle;
  /// max |closed - oracle| / max |closed|; the closed form vanishes at
  /// r = 1/sqrt2, so the gap is measured against its sup over the radii.
  double worst_gap = 0.0;
};

/// Closed form against the greedy oracle at n radii evenly spaced on
/// (sqrt2 - 1, 1] (right end included).
ExtremalComparison compare_extremal(const DensityFamilySpec& family, double sigma, int n = 8);

}  // namespace fluxchemo
