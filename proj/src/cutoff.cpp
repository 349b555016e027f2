#include "fluxchemo/cutoff.hpp"

#include "fluxchemo/errors.hpp"
#include "fluxchemo/params.hpp"

namespace fluxchemo {

Cutoff::Cutoff(double chi, double v0, double delta)
    : chi_(chi), v0_(v0), beta_(v0 / chi), delta_(delta), zero_(false) {
  if (!(chi > 0.0) || !(v0 > 0.0)) throw ConfigError("cutoff needs chi > 0 and v0 > 0");
  if (!(delta > 0.0 && delta < beta_)) throw ConfigError("cutoff needs 0 < delta < beta");
}

Cutoff::Cutoff(const Params& p) : Cutoff(p.chi, p.v0, p.delta) {}

Cutoff Cutoff::none() { return Cutoff(); }

double Cutoff::connector(double z) const {
  const double s = (z - (beta_ - delta_)) / delta_;
  const double y0 = chi_ * (beta_ - delta_);
  const double dy = v0_ - y0;  // == chi * delta
  const double m0 = chi_ * delta_;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return y0 + dy * (3.0 * s2 - 2.0 * s3) + m0 * (s3 - 2.0 * s2 + s);
}

double Cutoff::operator()(double z) const {
  if (zero_ || z <= 0.0) return 0.0;
  if (z <= beta_ - delta_) return chi_ * z;
  if (z >= beta_) return v0_;
  return connector(z);
}

}  // namespace fluxchemo
