#include "fluxchemo/chemo.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "fluxchemo/errors.hpp"
#include "fluxchemo/quadrature.hpp"

namespace fluxchemo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// FFTW planner calls are not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Antiderivative of X/(X^2+Y^2) in both variables (the -Y term cancels in the
// rectangle difference and is omitted).
double kernel_antiderivative(double X, double Y) {
  const double r2 = X * X + Y * Y;
  const double log_term = r2 > 0.0 ? 0.5 * Y * std::log(r2) : 0.0;
  const double atan_term = X != 0.0 ? X * std::atan(Y / X) : 0.0;
  return log_term + atan_term;
}

double rect_integral_x(double x1, double x2, double y1, double y2) {
  return kernel_antiderivative(x2, y2) - kernel_antiderivative(x1, y2) -
         kernel_antiderivative(x2, y1) + kernel_antiderivative(x1, y1);
}

}  // namespace

double DensityFamilySpec::mass_lo() const { return kPi * theta; }
double DensityFamilySpec::mass_hi() const { return 2.0 * kPi * theta; }

double grad_c_radial(const RadialProfile& rho2, double r, double sigma) {
  if (r <= 0.0) return 0.0;
  return -rho2.disk_integral(r) / (2.0 * kPi * sigma * r);
}

double grad_c_radial(const std::function<double(double)>& rho2, double r, double sigma,
                     double support) {
  if (r <= 0.0) return 0.0;
  const double upper = std::min(r, support);
  const double integral = integrate([&](double s) { return s * rho2(s); }, 0.0, upper, 256, 8);
  return -integral / (sigma * r);
}

double influence_V(double x, double y, double r) {
  const double dx = x - r;
  const double d2 = dx * dx + y * y;
  if (d2 == 0.0) throw DomainError("influence_V is singular at (r, 0)");
  return dx / (2.0 * kPi * d2);
}

std::array<double, 2> cell_gradient_kernel(double dx, double dy, double h,
                                           double exact_radius_cells) {
  const double hh = 0.5 * h;
  const double d2 = dx * dx + dy * dy;
  const double lim = exact_radius_cells * h;
  if (d2 < lim * lim) {
    const double ix = rect_integral_x(dx - hh, dx + hh, dy - hh, dy + hh);
    const double iy = rect_integral_x(dy - hh, dy + hh, dx - hh, dx + hh);
    return {-ix / (2.0 * kPi), -iy / (2.0 * kPi)};
  }
  const double g = hh / std::sqrt(3.0);
  double kx = 0.0;
  double ky = 0.0;
  for (double ox : {-g, g}) {
    for (double oy : {-g, g}) {
      const double X = dx + ox;
      const double Y = dy + oy;
      const double inv = 1.0 / (X * X + Y * Y);
      kx += X * inv;
      ky += Y * inv;
    }
  }
  const double w = -h * h / (4.0 * 2.0 * kPi);
  return {kx * w, ky * w};
}

namespace {

bool touches_boundary(const Field2D& f) {
  const int n = f.grid.n;
  for (int k = 0; k < n; ++k) {
    if (f(k, 0) != 0.0 || f(k, n - 1) != 0.0 || f(0, k) != 0.0 || f(n - 1, k) != 0.0) return true;
  }
  return false;
}

}  // namespace

struct PlanarGradient::Impl {
  int n = 0;
  int m = 0;
  int mc = 0;
  double* real_buf = nullptr;
  fftw_complex* rho_hat = nullptr;
  fftw_complex* kx_hat = nullptr;
  fftw_complex* ky_hat = nullptr;
  fftw_complex* work = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real_buf);
    fftw_free(rho_hat);
    fftw_free(kx_hat);
    fftw_free(ky_hat);
    fftw_free(work);
  }
};

PlanarGradient::PlanarGradient(const Grid2D& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  auto& I = *impl_;
  I.n = grid.n;
  I.m = 2 * grid.n;
  I.mc = I.m / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(I.m) * I.m;
  const std::size_t ncplx = static_cast<std::size_t>(I.m) * I.mc;
  {
    std::lock_guard lock(fftw_planner_mutex());
    I.real_buf = fftw_alloc_real(nreal);
    I.rho_hat = fftw_alloc_complex(ncplx);
    I.kx_hat = fftw_alloc_complex(ncplx);
    I.ky_hat = fftw_alloc_complex(ncplx);
    I.work = fftw_alloc_complex(ncplx);
    I.forward = fftw_plan_dft_r2c_2d(I.m, I.m, I.real_buf, I.rho_hat, FFTW_ESTIMATE);
    I.backward = fftw_plan_dft_c2r_2d(I.m, I.m, I.work, I.real_buf, FFTW_ESTIMATE);
  }
  const double h = grid.h();
  auto offset = [&](int a) { return a < I.n ? a : a - I.m; };
  for (int comp = 0; comp < 2; ++comp) {
    for (int b = 0; b < I.m; ++b) {
      for (int a = 0; a < I.m; ++a) {
        const std::size_t k = static_cast<std::size_t>(b) * I.m + a;
        if (a == I.n || b == I.n) {
          I.real_buf[k] = 0.0;
          continue;
        }
        const auto kern = cell_gradient_kernel(offset(a) * h, offset(b) * h, h);
        I.real_buf[k] = kern[comp];
      }
    }
    fftw_execute_dft_r2c(I.forward, I.real_buf, comp == 0 ? I.kx_hat : I.ky_hat);
  }
}

PlanarGradient::~PlanarGradient() = default;

GradC PlanarGradient::operator()(const Field2D& rho2, double sigma) const {
  if (!(rho2.grid == grid_)) throw ConfigError("PlanarGradient: grid mismatch");
  auto& I = *impl_;
  const std::size_t nreal = static_cast<std::size_t>(I.m) * I.m;
  const std::size_t ncplx = static_cast<std::size_t>(I.m) * I.mc;
  std::fill(I.real_buf, I.real_buf + nreal, 0.0);
  for (int j = 0; j < I.n; ++j) {
    for (int i = 0; i < I.n; ++i) I.real_buf[static_cast<std::size_t>(j) * I.m + i] = rho2(i, j);
  }
  fftw_execute_dft_r2c(I.forward, I.real_buf, I.rho_hat);

  GradC out{Field2D(grid_), Field2D(grid_), touches_boundary(rho2)};
  const double scale = 1.0 / (sigma * static_cast<double>(nreal));
  for (int comp = 0; comp < 2; ++comp) {
    const fftw_complex* kh = comp == 0 ? I.kx_hat : I.ky_hat;
    for (std::size_t k = 0; k < ncplx; ++k) {
      const double ar = I.rho_hat[k][0], ai = I.rho_hat[k][1];
      const double br = kh[k][0], bi = kh[k][1];
      I.work[k][0] = ar * br - ai * bi;
      I.work[k][1] = ar * bi + ai * br;
    }
    fftw_execute_dft_c2r(I.backward, I.work, I.real_buf);
    Field2D& dst = comp == 0 ? out.gx : out.gy;
    for (int j = 0; j < I.n; ++j) {
      for (int i = 0; i < I.n; ++i) {
        dst(i, j) = I.real_buf[static_cast<std::size_t>(j) * I.m + i] * scale;
      }
    }
  }
  return out;
}

GradC grad_c_direct(const Field2D& rho2, double sigma) {
  const Grid2D& g = rho2.grid;
  const int n = g.n;
  const double h = g.h();
  // Kernel table indexed by offset.
  const int m = 2 * n - 1;
  std::vector<double> kx(static_cast<std::size_t>(m) * m), ky(kx.size());
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const auto k = cell_gradient_kernel((a - (n - 1)) * h, (b - (n - 1)) * h, h);
      kx[static_cast<std::size_t>(b) * m + a] = k[0];
      ky[static_cast<std::size_t>(b) * m + a] = k[1];
    }
  }
  GradC out{Field2D(g), Field2D(g), touches_boundary(rho2)};
  for (int sj = 0; sj < n; ++sj) {
    for (int si = 0; si < n; ++si) {
      const double rho = rho2(si, sj);
      if (rho == 0.0) continue;
      for (int tj = 0; tj < n; ++tj) {
        const std::size_t row = static_cast<std::size_t>(tj - sj + n - 1) * m;
        for (int ti = 0; ti < n; ++ti) {
          const std::size_t k = row + (ti - si + n - 1);
          out.gx(ti, tj) += rho * kx[k];
          out.gy(ti, tj) += rho * ky[k];
        }
      }
    }
  }
  for (double& v : out.gx.data) v /= sigma;
  for (double& v : out.gy.data) v /= sigma;
  return out;
}

SourceCells::SourceCells(const Field2D& g) : h_(g.grid.h()) {
  for (int j = 0; j < g.grid.n; ++j) {
    for (int i = 0; i < g.grid.n; ++i) {
      if (g(i, j) != 0.0) cells_.push_back({g.grid.center(i), g.grid.center(j), g(i, j)});
    }
  }
}

std::array<double, 2> SourceCells::grad_c(double px, double py, double sigma) const {
  const double near2 = 64.0 * h_ * h_;
  const double mid2 = 1024.0 * h_ * h_;
  const double area = h_ * h_;
  double gx = 0.0;
  double gy = 0.0;
  for (const Cell& c : cells_) {
    const double dx = px - c.x;
    const double dy = py - c.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 >= mid2) {
      const double w = -c.rho * area / (2.0 * kPi * d2);
      gx += w * dx;
      gy += w * dy;
    } else {
      const auto k = cell_gradient_kernel(dx, dy, h_, d2 < near2 ? 8.0 : 0.0);
      gx += c.rho * k[0];
      gy += c.rho * k[1];
    }
  }
  return {gx / sigma, gy / sigma};
}

std::array<double, 2> grad_c_at(const Field2D& g, double sigma, double px, double py) {
  return SourceCells(g).grad_c(px, py, sigma);
}

double capped_normal_drift(double gx, double gy, double nx, double ny, const Cutoff& psi) {
  const double z = std::hypot(gx, gy);
  if (z == 0.0) return 0.0;
  return psi(z) * (gx * nx + gy * ny) / z;
}

DriftField assemble_drift(GradC grad, const Cutoff& psi) {
  DriftField d{Field2D(grad.gx.grid), Field2D(grad.gx.grid), std::move(grad.gx),
               std::move(grad.gy)};
  for (std::size_t k = 0; k < d.gx.data.size(); ++k) {
    const double gx = d.gx.data[k];
    const double gy = d.gy.data[k];
    const double z = std::hypot(gx, gy);
    if (z == 0.0) continue;
    const double s = psi(z) / z;
    d.bx.data[k] = s * gx;
    d.by.data[k] = s * gy;
  }
  return d;
}

namespace {

// Optimal set for r > 1: unit disk minus the disk of radius rho_d through
// P = (r, 0) centered at (r - rho_d, 0). Polar coordinates around P with
// phi = pi + alpha, sin(alpha) = sin(w)/r.
struct LevelSetPieces {
  double area = 0.0;
  double v_integral = 0.0;  // int_Omega V
};

LevelSetPieces level_set_integrals(double r, double rho_d) {
  auto integrand = [&](double w, bool want_area) {
    const double sa = std::sin(w) / r;
    const double ca = std::sqrt(std::max(1.0 - sa * sa, 0.0));
    const double cw = std::cos(w);
    const double rho_in = r * ca - cw;
    const double rho_out = r * ca + cw;
    const double cut = 2.0 * rho_d * ca;  // removed-disk boundary along this ray
    const double lo = std::max(rho_in, cut);
    const double jac = cw / (r * ca);
    if (lo >= rho_out) return 0.0;
    if (want_area) return 0.5 * (rho_out * rho_out - lo * lo) * jac;
    // V = cos(phi)/(2 pi rho) = -ca/(2 pi rho); int rho V drho = -ca (hi - lo)/(2 pi)
    return -ca * (rho_out - lo) / (2.0 * kPi) * jac;
  };
  LevelSetPieces p;
  const double a = -0.5 * kPi;
  const double b = 0.5 * kPi;
  p.area = integrate([&](double w) { return integrand(w, true); }, a, b, 2000, 8);
  p.v_integral = integrate([&](double w) { return integrand(w, false); }, a, b, 2000, 8);
  return p;
}

}  // namespace

double extremal_drift(double r, const DensityFamilySpec& family, double sigma) {
  const double lower = std::numbers::sqrt2 - 1.0;
  if (r <= lower) {
    throw DomainError("extremal_drift: r <= sqrt(2) - 1 is outside the supported regime");
  }
  if (r <= 1.0) return -(family.theta / sigma) * (r - kInvSqrt2);

  // Bisection on the removed-disk radius so the remaining area is pi/2.
  double lo = 0.0;
  double hi = 4.0 * r;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (level_set_integrals(r, mid).area > 0.5 * kPi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto pieces = level_set_integrals(r, 0.5 * (lo + hi));
  return family.cap() * pieces.v_integral / sigma;
}

double brute_force_extremal(double r, const DensityFamilySpec& family, double sigma,
                            int n_radial, int n_angular) {
  if (n_radial <= 0 || n_angular <= 0) throw ResolutionError("empty polar discretization");
  const double dr = 1.0 / n_radial;
  const double dphi = 2.0 * kPi / n_angular;
  const double max_cell_area = 0.5 * (1.0 - (1.0 - dr) * (1.0 - dr)) * dphi;
  const double target = family.mass_lo();
  if (family.cap() * max_cell_area > target / 100.0) {
    throw ResolutionError("brute_force_extremal: polar cells too coarse");
  }
  if (target <= 0.0) return 0.0;

  struct Cell {
    double v;
    double area;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  for (int ir = 0; ir < n_radial; ++ir) {
    const double r1 = ir * dr;
    const double r2 = r1 + dr;
    const double area = 0.5 * (r2 * r2 - r1 * r1) * dphi;
    const double rc = (2.0 / 3.0) * (r2 * r2 * r2 - r1 * r1 * r1) / (r2 * r2 - r1 * r1);
    for (int ia = 0; ia < n_angular; ++ia) {
      const double phi = (ia + 0.5) * dphi;
      const double x = rc * std::cos(phi);
      const double y = rc * std::sin(phi);
      const double dx = x - r;
      const double d2 = dx * dx + y * y;
      cells.push_back({d2 > 0.0 ? dx / (2.0 * kPi * d2) : 0.0, area});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.v > b.v; });
  double mass = 0.0;
  double acc = 0.0;
  for (const Cell& c : cells) {
    const double cell_mass = family.cap() * c.area;
    const double take = std::min(cell_mass, target - mass);
    acc += take * c.v;
    mass += take;
    if (mass >= target) break;
  }
  return acc / sigma;
}

ExtremalComparison compare_extremal(const DensityFamilySpec& family, double sigma, int n) {
  if (n < 1) throw DomainError("compare_extremal needs n >= 1");
  ExtremalComparison out;
  const double lo = std::numbers::sqrt2 - 1.0;
  double scale = 0.0, gap = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double r = lo + (1.0 - lo) * k / n;
    out.r.push_back(r);
    out.closed.push_back(extremal_drift(r, family, sigma));
    out.oracle.push_back(brute_force_extremal(r, family, sigma));
    scale = std::max(scale, std::abs(out.closed.back()));
    gap = std::max(gap, std::abs(out.closed.back() - out.oracle.back()));
  }
  out.worst_gap = gap / scale;
  return out;
}

}  // namespace fluxchemo
