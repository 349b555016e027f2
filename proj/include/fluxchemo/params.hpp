#pragma once

#include <optional>
#include <string>

namespace fluxchemo {

/// Dimensional inputs. Lengths [L], times [T]; see field comments.
struct PhysicalParams {
  double kappa = 1.0;  // diffusivity of rho1 [L^2/T]
  double chi = 1.0;    // chemotactic slope [L^2/T]
  double v0 = 1.0;     // speed cap [L/T]
  double eps = 1.0;    // reaction rate [1/T]
  double a = 1.0;      // chemical production rate [1/T]
  double sigma = 1.0;  // chemical diffusivity [L^2/T]
  double theta = 1.0;  // half peak density of rho2
  double l = 1.0;      // rho2 support radius [L]
  double L = 1.0;      // initial rho1 distance [L]
  double M0 = 1.0;     // rho1 mass [L^2]
  double beta = 1.0;   // sensitivity [1/L], chi * beta == v0
  double delta = 0.1;  // cutoff smoothing width [1/L]
};

enum class RegimeCheck { enforce, skip };

/// Dimensionless parameters after rescaling by kappa, l and a.
///
/// gamma, R0 and r0 are derived and kept consistent by make().
struct Params {
  double chi = 0.0;
  double v0 = 0.0;
  double eps = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double M0 = 0.0;
  double L = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double delta0 = 0.05;
  double R0 = 0.0;
  double r0 = 0.0;

  /// Builds a consistent bundle: gamma = theta*chi/sigma, beta = v0/chi,
  /// delta defaults to beta/10.
  static Params make(double chi, double v0, double eps, double theta, double sigma,
                     double M0, double L, std::optional<double> delta = std::nullopt,
                     double delta0 = 0.05, RegimeCheck check = RegimeCheck::enforce);

  /// Same bundle with gamma set directly (chi = gamma*sigma/theta).
  static Params from_gamma(double gamma, double v0, double eps, double theta, double sigma,
                           double M0, double L, RegimeCheck check = RegimeCheck::enforce);
};

double derived_R0(double gamma, double v0);
double derived_r0(double gamma, double v0);

/// Throws RegimeError naming the first violated assumption among
/// v0 <= 1, gamma >= 16, M0*v0^2 >= 40*pi*theta (and R0 > 1).
void check_regime(const Params& p);

/// Empty string when inside the admitted regime, otherwise a diagnostic.
std::string regime_violation(const Params& p);

/// Dimensionless rescaling x' = x/l, t' = t*kappa/l^2.
Params rescale(const PhysicalParams& p, RegimeCheck check = RegimeCheck::enforce);

/// Half-time regime partition by L relative to 1/v0 and R0.
enum class LRegime { near, intermediate, far };

LRegime classify(const Params& p);
const char* to_string(LRegime r);

}  // namespace fluxchemo
