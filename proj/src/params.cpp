#include "fluxchemo/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fluxchemo/errors.hpp"

namespace fluxchemo {

double derived_R0(double gamma, double v0) { return gamma / (2.0 * v0) - 1.0; }

double derived_r0(double gamma, double v0) { return v0 / gamma + 1.0 / std::numbers::sqrt2; }

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "parameter '" << name << "' must be positive and finite (got " << value << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace

std::string regime_violation(const Params& p) {
  std::ostringstream os;
  if (p.v0 > 1.0) {
    os << "v0 <= 1 violated (v0 = " << p.v0 << ")";
  } else if (p.gamma < 16.0) {
    os << "gamma >= 16 violated (gamma = " << p.gamma << ")";
  } else if (p.M0 * p.v0 * p.v0 < 40.0 * std::numbers::pi * p.theta) {
    os << "M0*v0^2 >= 40*pi*theta violated (M0*v0^2 = " << p.M0 * p.v0 * p.v0
       << ", 40*pi*theta = " << 40.0 * std::numbers::pi * p.theta << ")";
  } else if (!(p.R0 > 1.0)) {
    os << "R0 = gamma/(2 v0) - 1 > 1 violated (R0 = " << p.R0 << ")";
  }
  return os.str();
}

void check_regime(const Params& p) {
  if (auto msg = regime_violation(p); !msg.empty()) throw RegimeError(msg);
}

Params Params::make(double chi, double v0, double eps, double theta, double sigma, double M0,
                    double L, std::optional<double> delta, double delta0, RegimeCheck check) {
  require_positive(chi, "chi");
  require_positive(v0, "v0");
  require_positive(theta, "theta");
  require_positive(sigma, "sigma");
  if (eps < 0.0) throw ConfigError("parameter 'eps' must be nonnegative");
  if (M0 < 0.0) throw ConfigError("parameter 'M0' must be nonnegative");
  require_positive(L, "L");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw ConfigError("delta0 must lie in (0, 1)");

  Params p;
  p.chi = chi;
  p.v0 = v0;
  p.eps = eps;
  p.theta = theta;
  p.sigma = sigma;
  p.M0 = M0;
  p.L = L;
  p.gamma = theta * chi / sigma;
  p.beta = v0 / chi;
  p.delta = delta.value_or(p.beta / 10.0);
  if (!(p.delta > 0.0 && p.delta < p.beta)) throw ConfigError("delta must lie in (0, beta)");
  p.delta0 = delta0;
  p.R0 = derived_R0(p.gamma, v0);
  p.r0 = derived_r0(p.gamma, v0);
  if (check == RegimeCheck::enforce) check_regime(p);
  return p;
}

Params Params::from_gamma(double gamma, double v0, double eps, double theta, double sigma,
                          double M0, double L, RegimeCheck check) {
  require_positive(gamma, "gamma");
  return make(gamma * sigma / theta, v0, eps, theta, sigma, M0, L, std::nullopt, 0.05, check);
}

Params rescale(const PhysicalParams& in, RegimeCheck check) {
  require_positive(in.kappa, "kappa");
  require_positive(in.chi, "chi");
  require_positive(in.v0, "v0");
  require_positive(in.eps, "eps");
  require_positive(in.a, "a");
  require_positive(in.sigma, "sigma");
  require_positive(in.theta, "theta");
  require_positive(in.l, "l");
  require_positive(in.L, "L");
  require_positive(in.M0, "M0");
  require_positive(in.beta, "beta");
  require_positive(in.delta, "delta");
  if (std::abs(in.chi * in.beta - in.v0) > 1e-12 * in.v0) {
    throw ConfigError("physical parameters must satisfy chi * beta = v0");
  }

  const double chi = in.chi / in.kappa;
  const double v0 = in.v0 * in.l / in.kappa;
  const double eps = in.eps * in.l * in.l / in.kappa;
  const double M0 = in.M0 / (in.l * in.l);
  const double L = in.L / in.l;
  const double sigma = in.sigma / (in.l * in.l * in.a);
  const double delta = in.delta * in.l;

  Params p = Params::make(chi, v0, eps, in.theta, sigma, M0, L, delta, 0.05, RegimeCheck::skip);
  // beta carried through the rescaling rather than recomputed, so the identity
  // case is exact to the bit.
  p.beta = in.beta * in.l;
  if (check == RegimeCheck::enforce) check_regime(p);
  return p;
}

LRegime classify(const Params& p) {
  if (p.L <= 1.0 / p.v0) return LRegime::near;
  if (p.L <= p.R0) return LRegime::intermediate;
  return LRegime::far;
}

const char* to_string(LRegime r) {
  switch (r) {
    case LRegime::near: return "near";
    case LRegime::intermediate: return "intermediate";
    case LRegime::far: return "far";
  }
  return "unknown";
}

}  // namespace fluxchemo
