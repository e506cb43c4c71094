#include "derham/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "derham/errors.hpp"

namespace derham {

bool Ball::contains(std::span<const double> x, double tol) const {
  return distance(x, center) <= radius + tol;
}

bool Box::contains(std::span<const double> x, double tol) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

std::vector<double> Box::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

Ball Box::circumscribed() const {
  Ball b{center(), 0.0};
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) s += 0.25 * (hi[i] - lo[i]) * (hi[i] - lo[i]);
  b.radius = std::sqrt(s);
  return b;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Interval line_ball(std::span<const double> x, std::span<const double> w, const Ball& b) {
  // |x - c + t w|^2 = R^2 with |w| not assumed 1
  double ww = 0.0, dw = 0.0, dd = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - b.center[i];
    ww += w[i] * w[i];
    dw += d * w[i];
    dd += d * d;
  }
  const double disc = dw * dw - ww * (dd - b.radius * b.radius);
  if (ww == 0.0 || disc <= 0.0) return {0.0, 0.0};
  const double s = std::sqrt(disc);
  // numerically stable pair of roots
  const double q = -(dw + std::copysign(s, dw));
  double t0 = q / ww, t1 = (q != 0.0) ? (dd - b.radius * b.radius) / q : -t0;
  if (t0 > t1) std::swap(t0, t1);
  return {t0, t1};
}

Interval line_box(std::span<const double> x, std::span<const double> w, const Box& b) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] == 0.0) {
      if (x[i] < b.lo[i] || x[i] > b.hi[i]) return {0.0, 0.0};
      continue;
    }
    double t0 = (b.lo[i] - x[i]) / w[i];
    double t1 = (b.hi[i] - x[i]) / w[i];
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  }
  if (!(hi > lo)) return {0.0, 0.0};
  return {lo, hi};
}

Interval intersect(Interval a, Interval b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.empty()) return {0.0, 0.0};
  return r;
}

double hull_gap(std::span<const double> x, const Ball& a, const Ball& b) {
  const std::size_t n = x.size();
  std::vector<double> c(n);
  auto f = [&](double lam) {
    for (std::size_t i = 0; i < n; ++i) c[i] = lam * a.center[i] + (1 - lam) * b.center[i];
    return distance(x, c) - (lam * a.radius + (1 - lam) * b.radius);
  };
  // f is convex in lambda: golden-section search
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
  double f1 = f(m1), f2 = f(m2);
  for (int it = 0; it < 90; ++it) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - g * (hi - lo);
      f1 = f(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + g * (hi - lo);
      f2 = f(m2);
    }
  }
  return std::min({f(0.0), f(1.0), f1, f2});
}

bool in_starlike_hull(std::span<const double> x, const Ball& support, const Ball& base, double tol) {
  if (support.dimension() != base.dimension() || static_cast<int>(x.size()) != base.dimension())
    throw ContractViolation("in_starlike_hull: dimension mismatch");
  return hull_gap(x, support, base) <= tol;
}

std::string to_string(std::span<const double> x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace derham
