#pragma once

// Scalar fields with closed-form gradients, built from the polynomial ramp
//   H_k(s) = c_k int_{-1}^{s} (1 - t^2)^k dt   on [-1, 1], 0 before, 1 after.
// Fields carry the planes and spheres across which they stop being
// polynomial along lines, so that line integrals can be split exactly.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "derham/geometry.hpp"
#include "derham/polynomial.hpp"

namespace derham {

double smooth_step(int k, double s);
double smooth_step_derivative(int k, double s);

struct BreakPlane {
  int axis;
  double value;
};

struct Breaks {
  std::vector<BreakPlane> planes;
  std::vector<Ball> spheres;

  void append(const Breaks& o);
};

class ScalarField {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  ScalarField() = default;
  ScalarField(int n, ValueFn value, GradFn gradient, Breaks breaks = {}, std::optional<Ball> support = {});

  int dimension() const { return n_; }
  double value(std::span<const double> x) const { return value_(x); }
  /// Writes the gradient into g (size n).
  void gradient(std::span<const double> x, std::span<double> g) const { gradient_(x, g); }
  const Breaks& breaks() const { return breaks_; }
  /// Ball outside of which the field vanishes, if any.
  const std::optional<Ball>& support() const { return support_; }

 private:
  int n_ = 0;
  ValueFn value_;
  GradFn gradient_;
  Breaks breaks_;
  std::optional<Ball> support_;
};

ScalarField constant_field(int n, double c);
/// (1 - |x - c|^2 / R^2)^k_+
ScalarField radial_bump_field(std::span<const double> c, double R, int k);
/// 1 on |x - c| <= R1, 0 beyond R2, ramp in |x - c|^2 between.
ScalarField plateau_field(std::span<const double> c, double R1, double R2, int k);
/// H_k(2 (x_axis - a)/(b - a) - 1): 0 for x_axis <= a, 1 for x_axis >= b.
ScalarField ramp_up_field(int n, int axis, double a, double b, int k);
ScalarField ramp_down_field(int n, int axis, double a, double b, int k);
ScalarField polynomial_field(int n, const RationalPoly& p);

ScalarField product(const ScalarField& a, const ScalarField& b);
ScalarField one_minus(const ScalarField& a);
ScalarField sum(const ScalarField& a, const ScalarField& b);

}  // namespace derham
