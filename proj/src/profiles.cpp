#include "derham/profiles.hpp"

#include <cmath>

#include "derham/errors.hpp"

namespace derham {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double step_constant(int k) {
  // 1 / int_{-1}^1 (1 - t^2)^k dt
  double s = 0.0;
  for (int j = 0; j <= k; ++j) s += ((j % 2) ? -1.0 : 1.0) * binom(k, j) * 2.0 / (2 * j + 1);
  return 1.0 / s;
}

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double smooth_step(int k, double s) {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  double acc = 0.0;
  for (int j = 0; j <= k; ++j)
    acc += ((j % 2) ? -1.0 : 1.0) * binom(k, j) * (ipow(s, 2 * j + 1) + 1.0) / (2 * j + 1);
  return step_constant(k) * acc;
}

double smooth_step_derivative(int k, double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return step_constant(k) * ipow(1.0 - s * s, k);
}

void Breaks::append(const Breaks& o) {
  planes.insert(planes.end(), o.planes.begin(), o.planes.end());
  spheres.insert(spheres.end(), o.spheres.begin(), o.spheres.end());
}

ScalarField::ScalarField(int n, ValueFn value, GradFn gradient, Breaks breaks, std::optional<Ball> support)
    : n_(n), value_(std::move(value)), gradient_(std::move(gradient)), breaks_(std::move(breaks)),
      support_(std::move(support)) {}

ScalarField constant_field(int n, double c) {
  return ScalarField(
      n, [c](std::span<const double>) { return c; },
      [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); });
}

ScalarField radial_bump_field(std::span<const double> c, double R, int k) {
  if (R <= 0 || k < 1) throw ContractViolation("radial bump needs R > 0 and k >= 1");
  const int n = static_cast<int>(c.size());
  std::vector<double> cc(c.begin(), c.end());
  auto value = [cc, R, k](std::span<const double> x) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < cc.size(); ++i) d2 += (x[i] - cc[i]) * (x[i] - cc[i]);
    const double s = 1.0 - d2 / (R * R);
    return s > 0.0 ? ipow(s, k) : 0.0;
  };
  auto grad = [cc, R, k](std::span<const double> x, std::span<double> g) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < cc.size(); ++i) d2 += (x[i] - cc[i]) * (x[i] - cc[i]);
    const double s = 1.0 - d2 / (R * R);
    const double f = s > 0.0 ? -2.0 * k * ipow(s, k - 1) / (R * R) : 0.0;
    for (std::size_t i = 0; i < cc.size(); ++i) g[i] = f * (x[i] - cc[i]);
  };
  Ball b{cc, R};
  Breaks br;
  br.spheres.push_back(b);
  return ScalarField(n, value, grad, br, b);
}

ScalarField plateau_field(std::span<const double> c, double R1, double R2, int k) {
  if (!(R1 > 0 && R2 > R1)) throw ContractViolation("plateau needs 0 < R1 < R2");
  const int n = static_cast<int>(c.size());
  std::vector<double> cc(c.begin(), c.end());
  const double a = R1 * R1, span2 = R2 * R2 - R1 * R1;
  auto arg = [cc, a, span2](std::span<const double> x, double& d2) {
    d2 = 0.0;
    for (std::size_t i = 0; i < cc.size(); ++i) d2 += (x[i] - cc[i]) * (x[i] - cc[i]);
    return 2.0 * (d2 - a) / span2 - 1.0;
  };
  auto value = [arg, k](std::span<const double> x) {
    double d2;
    return 1.0 - smooth_step(k, arg(x, d2));
  };
  auto grad = [arg, cc, k, span2](std::span<const double> x, std::span<double> g) {
    double d2;
    const double f = -smooth_step_derivative(k, arg(x, d2)) * 4.0 / span2;
    for (std::size_t i = 0; i < cc.size(); ++i) g[i] = f * (x[i] - cc[i]);
  };
  Breaks br;
  br.spheres.push_back(Ball{cc, R1});
  br.spheres.push_back(Ball{cc, R2});
  return ScalarField(n, value, grad, br, Ball{cc, R2});
}

ScalarField ramp_up_field(int n, int axis, double a, double b, int k) {
  if (!(b > a)) throw ContractViolation("ramp needs a < b");
  if (axis < 0 || axis >= n) throw ContractViolation("ramp axis out of range");
  auto value = [axis, a, b, k](std::span<const double> x) { return smooth_step(k, 2.0 * (x[axis] - a) / (b - a) - 1.0); };
  auto grad = [axis, a, b, k](std::span<const double> x, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    g[axis] = smooth_step_derivative(k, 2.0 * (x[axis] - a) / (b - a) - 1.0) * 2.0 / (b - a);
  };
  Breaks br;
  br.planes.push_back({axis, a});
  br.planes.push_back({axis, b});
  return ScalarField(n, value, grad, br);
}

ScalarField ramp_down_field(int n, int axis, double a, double b, int k) {
  return one_minus(ramp_up_field(n, axis, a, b, k));
}

ScalarField polynomial_field(int n, const RationalPoly& p) {
  if (p.nvars() > n) throw ContractViolation("polynomial_field: too many variables");
  std::vector<RationalPoly> dp;
  for (int i = 0; i < n; ++i) dp.push_back(p.widened(n).derivative(i));
  auto pp = std::make_shared<RationalPoly>(p.widened(n));
  auto dpp = std::make_shared<std::vector<RationalPoly>>(std::move(dp));
  return ScalarField(
      n, [pp](std::span<const double> x) { return pp->evaluate(x); },
      [dpp](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < dpp->size(); ++i) g[i] = (*dpp)[i].evaluate(x);
      });
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  if (a.dimension() != b.dimension()) throw ContractViolation("product: dimension mismatch");
  const int n = a.dimension();
  auto value = [a, b](std::span<const double> x) {
    const double va = a.value(x);
    return va == 0.0 ? 0.0 : va * b.value(x);
  };
  auto grad = [a, b, n](std::span<const double> x, std::span<double> g) {
    std::vector<double> ga(n), gb(n);
    a.gradient(x, ga);
    b.gradient(x, gb);
    const double va = a.value(x), vb = b.value(x);
    for (int i = 0; i < n; ++i) g[i] = ga[i] * vb + va * gb[i];
  };
  Breaks br = a.breaks();
  br.append(b.breaks());
  std::optional<Ball> sup = a.support();
  if (!sup || (b.support() && b.support()->radius < sup->radius)) sup = b.support();
  return ScalarField(n, value, grad, br, sup);
}

ScalarField one_minus(const ScalarField& a) {
  auto value = [a](std::span<const double> x) { return 1.0 - a.value(x); };
  auto grad = [a](std::span<const double> x, std::span<double> g) {
    a.gradient(x, g);
    for (auto& v : g) v = -v;
  };
  return ScalarField(a.dimension(), value, grad, a.breaks());
}

ScalarField sum(const ScalarField& a, const ScalarField& b) {
  if (a.dimension() != b.dimension()) throw ContractViolation("sum: dimension mismatch");
  const int n = a.dimension();
  auto value = [a, b](std::span<const double> x) { return a.value(x) + b.value(x); };
  auto grad = [a, b, n](std::span<const double> x, std::span<double> g) {
    std::vector<double> gb(n);
    a.gradient(x, g);
    b.gradient(x, gb);
    for (int i = 0; i < n; ++i) g[i] += gb[i];
  };
  Breaks br = a.breaks();
  br.append(b.breaks());
  return ScalarField(n, value, grad, br);
}

}  // namespace derham
