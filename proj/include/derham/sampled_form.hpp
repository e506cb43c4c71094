#pragma once

// Numeric l-forms given by a coefficient callback, with declared support balls
// and the surfaces across which the coefficients stop being smooth.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "derham/exterior_algebra.hpp"
#include "derham/geometry.hpp"
#include "derham/poly_forms.hpp"
#include "derham/profiles.hpp"
#include "derham/smoothing_kernel.hpp"

namespace derham {

/// Dense double-precision evaluation of a PolyForm.
class CompiledPolyForm {
 public:
  CompiledPolyForm() = default;
  explicit CompiledPolyForm(const PolyForm& u);

  int dimension() const { return n_; }
  int degree() const { return l_; }
  /// out must have C(n, l) entries; it is overwritten.
  void eval(std::span<const double> x, std::span<double> out) const;

 private:
  struct Term {
    int index;
    double coeff;
    std::vector<std::uint8_t> alpha;
  };
  int n_ = 0, l_ = 0;
  std::size_t size_ = 0;
  std::vector<Term> terms_;
};

class SampledForm {
 public:
  using Evaluator = std::function<void(std::span<const double>, std::span<double>)>;

  SampledForm() = default;
  /// An empty support list means the form is not compactly supported.
  /// When a derivative is supplied it is spot-checked against central
  /// differences unless check_derivative is false.
  SampledForm(int n, int l, Evaluator f, std::vector<Ball> support, Breaks breaks = {},
              std::shared_ptr<const SampledForm> derivative = nullptr, bool check_derivative = true);

  int dimension() const { return n_; }
  int degree() const { return l_; }
  std::size_t size() const { return size_; }
  const std::vector<Ball>& support() const { return support_; }
  bool compact() const { return !support_.empty(); }
  const Breaks& breaks() const { return breaks_; }
  bool has_derivative() const { return derivative_ != nullptr; }
  const SampledForm& derivative() const;
  std::shared_ptr<const SampledForm> derivative_ptr() const { return derivative_; }

  /// Writes C(n, l) coefficients; exactly zero outside the support balls.
  void eval(std::span<const double> x, std::span<double> out) const;
  std::vector<double> eval(std::span<const double> x) const;
  bool in_support(std::span<const double> x) const;

  /// Bounding box of the support balls (throws if not compact).
  Box bounding_box() const;
  /// Max-norm estimate from a deterministic sample of the support.
  double sup_norm_estimate(int per_axis = 24) const;

  std::string label;

 private:
  int n_ = 0, l_ = 0;
  std::size_t size_ = 0;
  Evaluator f_;
  std::vector<Ball> support_;
  Breaks breaks_;
  std::shared_ptr<const SampledForm> derivative_;
};

/// Sorted parameters s in [lo, hi] splitting the line x + s w into pieces on
/// which u is smooth (support spheres, break spheres and break planes), with
/// lo and hi included. Pieces whose midpoint lies outside the support can be
/// skipped by the caller.
std::vector<double> line_breakpoints(const SampledForm& u, std::span<const double> x, std::span<const double> w,
                                     double lo, double hi);

/// Largest relative deviation between the derivative evaluator and central
/// differences of the form at deterministic points of its support.
double derivative_consistency(const SampledForm& u, int points = 12);

SampledForm zero_sampled(int n, int l);
/// f * P with exact derivative df ^ P + f dP; f must have a support ball.
SampledForm profile_form(const ScalarField& f, const PolyForm& P);
/// chi * u; derivative dchi ^ u + chi du when u has one.
SampledForm scaled(const ScalarField& chi, const SampledForm& u);
/// dchi ^ u; derivative -dchi ^ du when u has one.
SampledForm gradient_wedge(const ScalarField& chi, const SampledForm& u);
SampledForm sum(const SampledForm& a, const SampledForm& b, double wa = 1.0, double wb = 1.0);
SampledForm hodge(const SampledForm& u);
/// c * theta dx_1 ^ ... ^ dx_n.
SampledForm volume_form(const ThetaBump& theta, double c = 1.0);

/// Exterior derivative of a form-valued function by central differences
/// (second order, or fourth order with five_point).
std::vector<double> fd_exterior_derivative(int n, int l,
                                           const std::function<std::vector<double>(std::span<const double>)>& f,
                                           std::span<const double> x, double h, bool five_point = false);

}  // namespace derham
