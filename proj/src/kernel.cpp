#include "derham/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "derham/errors.hpp"
#include "derham/parallel.hpp"
#include "derham/quadrature.hpp"

namespace derham {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_args(const ThetaBump& theta, int l, std::span<const double> x, std::span<const double> y) {
  const int n = theta.dimension();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw ContractViolation("kernel_G: point dimension differs from theta");
  if (l < 0 || l > n) throw ContractViolation("kernel_G: l must lie in 0..n");
}

double separation(std::span<const double> x, std::span<const double> y, double floor) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
  d = std::sqrt(d);
  if (d < floor) throw SingularEvaluation("kernel_G: |x - y| = " + std::to_string(d) + " is below the singular floor");
  return d;
}

}  // namespace

double kernel_G(const ThetaBump& theta, int l, std::span<const double> x, std::span<const double> y, double floor) {
  check_args(theta, l, x, y);
  separation(x, y, floor);
  const int n = theta.dimension();
  std::vector<double> z(n), p(n);
  for (int i = 0; i < n; ++i) z[i] = x[i] - y[i];
  // theta(y + t z) vanishes off this interval
  const Interval iv = intersect(theta.line_support(y, z), Interval{1.0, kInf});
  if (iv.empty()) return 0.0;
  // l = 0 gives t^{-1}: t >= 1 keeps it smooth, but not polynomial
  const int q = (theta.line_degree() + n) / 2 + 2 + (l == 0 ? 24 : 0);
  const GaussRule& g = gauss_legendre(q);
  const double h = 0.5 * (iv.hi - iv.lo), c = 0.5 * (iv.hi + iv.lo);
  double s = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double t = c + h * g.nodes[k];
    for (int i = 0; i < n; ++i) p[i] = y[i] + t * z[i];
    const double tl = l >= 1 ? ipow(t, l - 1) : 1.0 / t;
    s += g.weights[k] * ipow(t - 1.0, n - l) * tl * theta.eval(p);
  }
  return h * s;
}

double radial_profile(const ThetaBump& theta, int k, std::span<const double> x, std::span<const double> w) {
  const int n = theta.dimension();
  const Interval iv = intersect(theta.line_support(x, w), Interval{0.0, kInf});
  if (iv.empty()) return 0.0;
  const GaussRule& g = gauss_legendre((theta.line_degree() + n) / 2 + 2);
  const double h = 0.5 * (iv.hi - iv.lo), c = 0.5 * (iv.hi + iv.lo);
  std::vector<double> p(n);
  double s = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const double r = c + h * g.nodes[q];
    for (int i = 0; i < n; ++i) p[i] = x[i] + r * w[i];
    s += g.weights[q] * ipow(r, n - k - 1) * theta.eval(p);
  }
  return h * s;
}

double kernel_G_homogeneous(const ThetaBump& theta, int l, std::span<const double> x, std::span<const double> y,
                            double floor) {
  check_args(theta, l, x, y);
  if (l == 0) throw ContractViolation("kernel_G_homogeneous: the finite sum needs l >= 1");
  const double d = separation(x, y, floor);
  const int n = theta.dimension();
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = (x[i] - y[i]) / d;
  double s = 0.0;
  for (int k = 0; k < l; ++k) s += binomial(l - 1, k) * std::pow(d, k - n) * radial_profile(theta, k, x, w);
  return s;
}

KernelAgreement kernel_agreement(const ThetaBump& theta, int l, int pairs, std::uint64_t seed) {
  const int n = theta.dimension();
  const Box box = theta.support_box();
  const Ball b = theta.support_ball();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  KernelAgreement r;
  std::vector<double> a(n), x(n), y(n);
  while (r.pairs < pairs) {
    // y anywhere near B, a inside supp theta, x on the segment y..a so that
    // the ray y + t(x - y), t >= 1, passes through a
    for (int i = 0; i < n; ++i) {
      y[i] = b.center[i] + 2.0 * b.radius * (2.0 * U(rng) - 1.0);
      a[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (0.05 + 0.9 * U(rng));
    }
    const double t = 1.0 + 3.0 * U(rng);
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = y[i] + (a[i] - y[i]) / t;
      d += (x[i] - y[i]) * (x[i] - y[i]);
    }
    if (std::sqrt(d) < 1e-3) continue;
    const double g = kernel_G(theta, l, x, y), h = kernel_G_homogeneous(theta, l, x, y);
    ++r.pairs;
    const double scale = std::max(std::abs(g), std::abs(h));
    if (scale == 0.0) continue;
    ++r.nonzero;
    r.max_relative = std::max(r.max_relative, std::abs(g - h) / scale);
  }
  return r;
}

std::vector<std::vector<double>> sphere_directions(int n, int count) {
  std::vector<std::vector<double>> out;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2 * std::numbers::pi * (k + 0.5) / count;
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  if (n == 3) {  // Fibonacci lattice
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count, r = std::sqrt(1.0 - z * z);
      out.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
    return out;
  }
  // n > 3: normalized Gaussian draws from a fixed seed
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> N;
  for (int k = 0; k < count; ++k) {
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& c : v) {
      c = N(rng);
      s += c * c;
    }
    for (auto& c : v) c /= std::sqrt(s);
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<double>> cap_directions(std::span<const double> axis, double half_angle, int count) {
  const int n = static_cast<int>(axis.size());
  std::vector<std::vector<double>> out;
  if (n == 2) {
    const double a0 = std::atan2(axis[1], axis[0]);
    for (int k = 0; k < count; ++k) {
      const double a = a0 + half_angle * (2.0 * (k + 0.5) / count - 1.0);
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  if (n != 3) throw ContractViolation("cap_directions: n must be 2 or 3");
  // Fibonacci lattice on the cap around e3, rotated onto axis
  std::vector<double> e1(3), e2(3);
  const int m = std::abs(axis[0]) < 0.9 ? 0 : 1;
  std::vector<double> ref(3, 0.0);
  ref[m] = 1.0;
  double dot = 0.0;
  for (int i = 0; i < 3; ++i) dot += ref[i] * axis[i];
  double len = 0.0;
  for (int i = 0; i < 3; ++i) {
    e1[i] = ref[i] - dot * axis[i];
    len += e1[i] * e1[i];
  }
  for (auto& v : e1) v /= std::sqrt(len);
  e2 = {axis[1] * e1[2] - axis[2] * e1[1], axis[2] * e1[0] - axis[0] * e1[2], axis[0] * e1[1] - axis[1] * e1[0]};
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double zmin = std::cos(half_angle);
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (1.0 - zmin) * (k + 0.5) / count, r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double c = r * std::cos(golden * k), s = r * std::sin(golden * k);
    out.push_back({z * axis[0] + c * e1[0] + s * e2[0], z * axis[1] + c * e1[1] + s * e2[1],
                   z * axis[2] + c * e1[2] + s * e2[2]});
  }
  return out;
}

WeakSingularityScan weak_singularity_scan(const ThetaBump& theta, int l, const std::vector<std::vector<double>>& points,
                                          double rho_max, int directions, int radii) {
  const int n = theta.dimension();
  if (l < 1 || l > n) throw ContractViolation("weak_singularity_scan: l must lie in 1..n");
  if (directions == 0) directions = n == 2 ? 64 : 1024;
  if (!(rho_max > 1e-6) || directions < 2 || radii < 2) throw ContractViolation("weak_singularity_scan: bad grid");
  const int refine = n == 2 ? 2 : 4;  // the refined grid has refine x the directions
  WeakSingularityScan s;
  s.l = l;
  s.rho_max = rho_max;
  s.directions = directions;
  s.radii = radii;
  s.points = points;
  s.constant.assign(points.size(), 0.0);
  s.constant_refined.assign(points.size(), 0.0);
  s.limit.assign(points.size(), 0.0);

  // only directions w with x + r w in B matter
  const Ball B = theta.support_ball();
  auto dirs_for = [&](std::span<const double> x, int nd) {
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += (B.center[i] - x[i]) * (B.center[i] - x[i]);
    d = std::sqrt(d);
    if (d <= B.radius || n > 3) return sphere_directions(n, nd);
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = (B.center[i] - x[i]) / d;
    return cap_directions(axis, std::asin(B.radius / d), nd);
  };
  auto sweep = [&](std::span<const double> x, int nd, int nr) {
    std::vector<double> y(n);
    double best = 0.0;
    for (const auto& w : dirs_for(x, nd))
      for (int k = 0; k < nr; ++k) {
        const double rho = 1e-6 * std::pow(rho_max / 1e-6, static_cast<double>(k) / (nr - 1));
        for (int i = 0; i < n; ++i) y[i] = x[i] - rho * w[i];
        best = std::max(best, std::abs(kernel_G(theta, l, x, y)) * ipow(rho, n));
      }
    return best;
  };
  parallel_for(points.size(), [&](std::size_t p) {
    s.constant[p] = sweep(points[p], directions, radii);
    s.constant_refined[p] = sweep(points[p], refine * directions, 2 * radii - 1);
    double a0 = 0.0;
    for (const auto& w : dirs_for(points[p], refine * directions))
      a0 = std::max(a0, radial_profile(theta, 0, points[p], w));
    s.limit[p] = a0;
  });
  for (std::size_t p = 0; p < points.size(); ++p) {
    s.sup_constant = std::max(s.sup_constant, s.constant_refined[p]);
    if (s.constant_refined[p] > 0.0)
      s.max_change = std::max(s.max_change, std::abs(s.constant_refined[p] - s.constant[p]) / s.constant_refined[p]);
  }
  return s;
}

}  // namespace derham
