#pragma once

#include <string>
#include <vector>

#include "fluxchemo/grid.hpp"
#include "fluxchemo/params.hpp"

namespace fluxchemo {

/// Complementary error function.
double erfc(double x);

struct KernelBoundQuery {
  double x1 = 0.0, x2 = 0.0;  // evaluation point
  double y1 = 0.0, y2 = 0.0;  // source point
  double t = 1.0;
  double s = 0.0;
  double B = 0.0;  // drift bound
};

/// One coordinate factor of the bounded-drift lower bound at separation d,
/// elapsed time tau and drift bound B.
double kernel_bound_factor(double d, double tau, double B);

/// Product of the two factors; may be negative (vacuous). Throws DomainError
/// unless t > s and B >= 0.
double gamma_lower_bound(const KernelBoundQuery& q);

/// Free 2D heat kernel (4 pi t)^-1 exp(-(dx^2 + dy^2)/(4t)).
double heat_kernel_2d(double dx, double dy, double t);

struct HarnackResult {
  double a = 0.0;
  double d1 = 0.0, d2 = 0.0;  // minimizing offsets (units of 1/v0)
  std::string diagnostic;     // nonempty when the bound is vacuous
};

/// a(C3) = inf of gamma_lower_bound / v0^2 over |x_i - y_i| <= C3/v0 and
/// |x - y| <= C3/v0 at t = 1/v0^2, B = v0. 201 x 201 grid over the offsets,
/// then a dense scan and golden-section refinement along the arc
/// |x - y| = C3/v0, where the bound is smallest.
HarnackResult harnack_constant(double C3, double v0 = 1.0);

/// sum_{k >= 0} 4^k exp(2 (1 - 2^k)), truncated once a term is below 1e-15.
double c2_series();
/// Partial sum through k = kmax.
double c2_partial(int kmax);

/// A frozen drift field on a planar grid and its bound B >= max |b|.
struct FrozenDrift {
  Field2D bx;
  Field2D by;
  double B = 0.0;
  std::string label;
};

FrozenDrift zero_drift(const Grid2D& grid);
/// Constant drift of norm B pointing along `angle`.
FrozenDrift constant_drift(const Grid2D& grid, double B, double angle);
/// Saturated chemotactic drift of the initial attractant profile for p
/// (B = v0).
FrozenDrift chemotactic_drift(const Params& p, const Grid2D& grid);

struct KernelQuery {
  double x1 = 0.0, x2 = 0.0;
  double t = 1.0;
};

struct KernelCheck {
  KernelQuery query;        // x snapped to the nearest cell center
  double y1 = 0.0, y2 = 0.0;  // snapped source
  double pde_value = 0.0;
  double bound = 0.0;
  double allowance = 0.0;
  double heat = 0.0;  // free heat kernel at t + w^2/2 (mollified delta)
  bool passed() const { return pde_value >= bound - allowance; }
};

/// Solves d_t phi = Lap phi + b . grad phi forward from a Gaussian of width
/// w (variance w^2 per axis) at y and compares phi(x, t) with the lower bound
/// at each query. w = 0 picks sqrt(min t)/10.
///
/// Allowance: |K(t) - K(t + w^2/2)| + 0.01 K(t), K the free heat kernel at
/// the query separation, covering the mollified start and the spatial error.
/// Throws ConfigError if |b| > B on the grid or w > sqrt(min t)/10.
std::vector<KernelCheck> kernel_bound_vs_pde(const FrozenDrift& drift, double y1, double y2,
                                             const std::vector<KernelQuery>& queries,
                                             double width = 0.0);

struct KernelBattery {
  std::string label;
  double B = 0.0;
  std::vector<KernelCheck> checks;
  bool passed() const;
};

/// Validation battery at v0 = 1 on a 480^2 grid of half-width 12: zero,
/// constant (B = 1) and frozen chemotactic drift (gamma = 16, theta = 1/4),
/// each with n_queries points at |x - y| <= 5 and t in {1/2, 1}. The three
/// solves run concurrently.
std::vector<KernelBattery> kernel_battery(int n_queries = 20);

}  // namespace fluxchemo
