#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluxchemo/chemo.hpp"
#include "fluxchemo/grid.hpp"
#include "fluxchemo/params.hpp"

namespace fluxchemo {

/// Radial potential H whose derivative dominates the inward chemotactic drift:
///
///   dH = -gamma/(4r)       r > R0
///        eta1(r)           R0-1 <= r <= R0
///        -v0               1 < r < R0-1
///        eta2(r)           r0 < r <= 1
///        v0                0 <= r <= r0
///
/// Both bridges are cubic Hermite polynomials, so H is obtained by exact
/// integration and normalized by H(R0) = -(gamma/4) log R0.
class PotentialH {
 public:
  /// Throws RegimeError if R0 - 1 <= 1 (the branches would overlap).
  static PotentialH build(const Params& p);

  /// H identically zero (used for heat-equation reference solves).
  static PotentialH flat();

  double dH(double r) const;
  double H(double r) const;
  double eta1(double r) const;
  double eta2(double r) const;

  double gamma() const { return gamma_; }
  double v0() const { return v0_; }
  double R0() const { return R0_; }
  double r0() const { return r0_; }
  bool is_flat() const { return flat_; }
  /// True when the eta1 Hermite bridge left its admissible band and the
  /// linear bridge is used instead.
  bool eta1_linear() const { return eta1_linear_; }

 private:
  struct Cubic {
    double a = 0.0, b = 0.0;        // interval
    double y0 = 0.0, y1 = 0.0;      // end values
    double m0 = 0.0, m1 = 0.0;      // end slopes (per unit r)
    bool linear = false;
    double value(double r) const;
    /// int_a^r value(s) ds
    double integral_from_a(double r) const;
  };

  bool flat_ = false;
  bool eta1_linear_ = false;
  double gamma_ = 0.0, v0_ = 0.0, R0_ = 0.0, r0_ = 0.0;
  Cubic eta1_, eta2_;
  // H at the branch points R0, R0-1, 1, r0.
  double H_R0_ = 0.0, H_R0m1_ = 0.0, H_1_ = 0.0, H_r0_ = 0.0;
};

PotentialH build_potential(const Params& p);

/// Grid for family members: n x n cells on [-1, 1]^2.
Grid2D family_grid(int n = 64);

/// Cell-averaged 2 theta 1_{B(0,1)}.
Field2D full_ball_density(double theta, const Grid2D& grid);

/// Cell-averaged 2 theta 1_Omega with Omega = B(0,1) minus B((r - 1/sqrt2, 0), 1/sqrt2),
/// rotated by `angle`. Requires sqrt2 - 1 < r <= 1.
Field2D case2_extremal_density(double theta, double r, const Grid2D& grid, double angle = 0.0);

/// Random family members: cap-respecting smooth mixtures with mass drawn
/// uniformly in [pi theta, 2 pi theta]. Deterministic in `seed`.
std::vector<Field2D> random_family_members(double theta, const Grid2D& grid, int count,
                                           std::uint64_t seed);

/// Standard domination test set: the full ball (id 0), ten case-2 extremal
/// sets with r evenly spaced on (sqrt2 - 1, 1] and rotated (ids 1-10), then
/// `n_random` random members.
std::vector<Field2D> domination_test_set(double theta, const Grid2D& grid, int n_random = 50,
                                         std::uint64_t seed = 12345);

/// Empty string if g is a cell-averaged member of the family, else the reason.
std::string family_violation(const Field2D& g, const DensityFamilySpec& family);

/// n radii log-spaced on [lo, hi].
std::vector<double> log_radius_grid(double lo, double hi, int n);

struct DominationRow {
  double r = 0.0;
  int g_id = 0;
  double lhs = 0.0;     // dH(r)
  double rhs = 0.0;     // max over sampled boundary points of the normal drift
  double margin = 0.0;  // lhs - rhs
};

struct DominationReport {
  std::vector<DominationRow> rows;
  std::size_t violations = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;

  bool passed() const { return violations == 0; }
};

/// For every sample g and radius r, evaluates Psi(|grad c|)(grad c . n)/|grad c|
/// at `n_angles` equispaced points on the circle of radius r and checks
/// dH(r) >= max + (-tolerance). Radii must exceed r0 (1 + 1e-3).
/// Throws std::invalid_argument if a sample is outside the family.
DominationReport verify_domination(const PotentialH& pot, const Params& p,
                                   const std::vector<Field2D>& samples,
                                   const std::vector<double>& r_grid, int n_angles = 256,
                                   double tolerance = 0.0);

}  // namespace fluxchemo
