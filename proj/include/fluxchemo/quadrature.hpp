#pragma once

#include <vector>

namespace fluxchemo {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on Legendre polynomials).
GaussRule gauss_legendre(int n);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 64, int order = 8) {
  static thread_local GaussRule rule;
  if (static_cast<int>(rule.nodes.size()) != order) rule = gauss_legendre(order);
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    double s = 0.0;
    for (int k = 0; k < order; ++k) s += rule.weights[k] * f(mid + 0.5 * w * rule.nodes[k]);
    total += 0.5 * w * s;
  }
  return total;
}

}  // namespace fluxchemo
