#pragma once

// Compactly supported smoothing functions with unit integral.
//
// tensor: theta(x) = prod_i c_k / r * (1 - ((x_i - x0_i)/r)^2)^k_+ ,
//         c_k = 1 / int_{-1}^1 (1 - t^2)^k dt = (2k+1)!! / (2^{k+1} k!)
// radial: theta(x) = c * (1 - |x - x0|^2 / r^2)^k_+ , c normalising numerically
//
// Both are C^{k-1}. Tensor moments are exact rationals.

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "derham/geometry.hpp"
#include "derham/rational.hpp"

namespace derham {

enum class BumpKind { tensor, radial };

class ThetaBump {
 public:
  ThetaBump() = default;

  int dimension() const { return n_; }
  BumpKind kind() const { return kind_; }
  int smoothness() const { return k_; }
  const std::vector<Rational>& center() const { return center_; }
  const Rational& half_width() const { return r_; }
  std::span<const double> center_d() const { return center_d_; }
  double half_width_d() const { return r_d_; }
  /// Exact c_k for the tensor kind.
  Rational tensor_constant() const;

  /// Ball containing the support: radius r sqrt(n) (tensor) or r (radial).
  Ball support_ball() const;
  /// Axis-aligned box containing the support.
  Box support_box() const;
  /// Interval of the line x + t w (t real) on which theta may be nonzero.
  Interval line_support(std::span<const double> x, std::span<const double> w) const;
  /// Polynomial degree of theta restricted to a line inside its support.
  int line_degree() const { return kind_ == BumpKind::tensor ? 2 * k_ * n_ : 2 * k_; }

  double eval(std::span<const double> x) const;

  /// Exact moment int theta(a) a^alpha da (tensor kind only).
  Rational moment(std::span<const int> alpha) const;
  /// Moment in double precision; exact-then-rounded for the tensor kind,
  /// closed-form Gamma expressions for the radial kind.
  double moment_d(std::span<const int> alpha) const;
  /// Exact 1D moments of the axis factor: entries p = 0..max_power.
  std::vector<Rational> axis_moments(int axis, int max_power) const;

  /// Fourier transform int e^{-i<xi,x>} theta(x) dx (tensor kind).
  std::complex<double> fourier(std::span<const double> xi) const;
  /// d/dxi_j of the Fourier transform (0-based j).
  std::complex<double> fourier_gradient(std::span<const double> xi, int j) const;

  nlohmann::json to_json() const;
  std::string describe() const;

  friend ThetaBump make_tensor_bump(int n, std::span<const Rational> x0, const Rational& r, int k);
  friend ThetaBump make_radial_bump(int n, std::span<const Rational> x0, const Rational& r, int k);

 private:
  struct MomentCache;

  BumpKind kind_ = BumpKind::tensor;
  int n_ = 0;
  int k_ = 1;
  std::vector<Rational> center_;
  Rational r_;
  std::vector<double> center_d_;
  double r_d_ = 0.0;
  double norm_d_ = 0.0;  // prefactor: (c_k/r)^n or c
  std::shared_ptr<MomentCache> cache_;
};

ThetaBump make_tensor_bump(int n, std::span<const Rational> x0, const Rational& r, int k);
ThetaBump make_radial_bump(int n, std::span<const Rational> x0, const Rational& r, int k);
/// Centred tensor bump on [-r, r]^n.
ThetaBump centered_tensor_bump(int n, const Rational& r = 1, int k = 1);
/// Largest tensor bump whose support box lies in the given ball.
ThetaBump inscribed_tensor_bump(const Ball& ball, int k, int denominator = 1000);

/// Parses {kind, n, center, r, k}; numbers may be JSON numbers or strings.
ThetaBump bump_from_json(const nlohmann::json& j);

/// Fourier transform of the unit axis factor c_k (1 - t^2)^k on [-1, 1]:
/// (2k+1)!! j_k(w) / w^k, and its derivative.
double bump_fourier_1d(int k, double w);
double bump_fourier_1d_derivative(int k, double w);

}  // namespace derham
