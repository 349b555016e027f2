#pragma once

namespace fluxchemo {

struct Params;

/// Flux-limiting sensitivity Psi: linear with slope chi up to beta - delta,
/// constant v0 from beta on, cubic Hermite bridge in between.
///
/// The bridge matches value and slope at both ends and satisfies
/// psi(z) - chi*z = chi*delta*s^2*(1-s) >= 0 with s the bridge coordinate.
class Cutoff {
 public:
  Cutoff(double chi, double v0, double delta);
  explicit Cutoff(const Params& p);

  /// Identically zero cutoff (diffusion-only baseline).
  static Cutoff none();

  double operator()(double z) const;

  /// Hermite connector on (beta - delta, beta); callers must stay in range.
  double connector(double z) const;

  double chi() const { return chi_; }
  double v0() const { return v0_; }
  double beta() const { return beta_; }
  double delta() const { return delta_; }
  bool is_zero() const { return zero_; }

 private:
  Cutoff() = default;

  double chi_ = 0.0;
  double v0_ = 0.0;
  double beta_ = 0.0;
  double delta_ = 0.0;
  bool zero_ = true;
};

}  // namespace fluxchemo
