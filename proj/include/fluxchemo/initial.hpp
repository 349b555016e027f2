#pragma once

#include <string>

#include "fluxchemo/grid.hpp"
#include "fluxchemo/params.hpp"

namespace fluxchemo {

enum class Rho1Kind { radial_ring, offset_bump };

const char* to_string(Rho1Kind k);
Rho1Kind rho1_kind_from_string(const std::string& s);

struct InitialData {
  Rho1Kind rho1_kind = Rho1Kind::radial_ring;
  Field2D rho1;
  Field2D rho2;
};

/// Plateau eta: 1 on [0, 1 - delta0], 0 from r = 1 on, C-infinity in between.
double eta_plateau(double r, double delta0);

/// Unnormalized smooth bump on the annulus 3L/4 < r < L.
double ring_shape(double r, double L);

/// Unnormalized smooth bump of the given radius around the origin.
double bump_shape(double dist, double radius);

/// Half-width of the default truncated domain: covers B(0, L + 5/v0) and is at
/// least max(2L, 8/v0).
double default_half_width(const Params& p);

/// Default planar grid with the given number of cells per unit length.
Grid2D default_grid(const Params& p, int cells_per_unit = 8);

/// Builds rho1 (mass M0, supported in L/2 < |x| <= L) and rho2 = 2 theta eta.
///
/// The offset bump is centered at 3L/4 in the direction `bump_angle`.
/// Throws ResolutionError if the grid has fewer than 16 cells across B(0,1),
/// ConfigError if it does not cover B(0, L + 5/v0).
InitialData make_initial(const Params& p, Rho1Kind kind, const Grid2D& grid,
                         double bump_angle = 0.0);

/// rho2 cell averages of 2 theta eta on a grid (sub-sampled near the edge).
Field2D make_rho2(const Params& p, const Grid2D& grid);

}  // namespace fluxchemo
