#pragma once

// Numeric Bogovskii operator T_l and regularized Poincare operator R_l on
// sampled forms, evaluated in polar coordinates about the evaluation point.
//
// With a = x + rho w (|w| = 1):
//   T_l u(x) = int_S sum_m C(l-1, m) Theta_m(w) w ⌟ I_m(w) dw,
//     Theta_m(w) = int_0^inf theta(x + rho w) rho^{n-1-m} drho,
//     I_m(w)     = int_0^inf s^m u(x - s w) ds,
//   R_l u(x) = -int_S w ⌟ int_0^inf u(x + s w) W(s) ds dw,
//     W(s) = int_s^inf theta(x + rho w) rho^{n-l} (rho - s)^{l-1} drho.
// Along a ray theta is a polynomial on one interval and the fixtures are
// piecewise polynomial, so every radial integral is a Gauss rule on exact
// pieces. The t-singularity at a = x becomes the polar Jacobian and no
// cut-off region is needed; only the direction integral is adaptive.

#include <span>
#include <vector>

#include "derham/directions.hpp"
#include "derham/sampled_form.hpp"
#include "derham/smoothing_kernel.hpp"

namespace derham {

struct Cubature {
  int radial = 24;   // Gauss points per radial piece (polar rule)
  int angular = 48;  // trapezoid points in the azimuth (polar rule)
  int box_points = 12;
  int box_panels = 6;
};

struct BogovskiiContext {
  ThetaBump theta;
  Ball base;  // ball B containing supp theta
  DirectionRule directions;
  int line_points = 16;    // Gauss points per smooth piece along a ray
  double fd_step = 1e-4;   // relative finite-difference step for dT
  bool five_point = false;
  Cubature cubature;

  explicit BogovskiiContext(ThetaBump t);
  int dimension() const { return theta.dimension(); }
};

/// T_l u(x), l = degree of u in 1..n. Requires compact support.
std::vector<double> bogovskii_T(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x,
                                DirectionStats* stats = nullptr);
/// R_l u(x), l = degree of u in 1..n.
std::vector<double> poincare_R_numeric(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x,
                                       DirectionStats* stats = nullptr);
/// R_0 u = (theta, u) for a 0-form.
double poincare_R0_numeric(const BogovskiiContext& ctx, const SampledForm& u);
/// Q_l u = *^{-1}[(-1)^{l-1} R_{n-l}(*u)], l = degree of u in 0..n-1.
std::vector<double> q_operator(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x);

struct CubatureNode {
  std::vector<double> x;
  double w;
};

/// Nodes and weights of the rule used by integrate_supported. Box-rule nodes
/// outside every ball are dropped (the integrands vanish there).
std::vector<CubatureNode> support_cubature(int n, const std::vector<Ball>& balls, const Breaks& breaks,
                                           const Cubature& rule = {});

/// int f over the union of balls, f writing out.size() components; polar rule
/// for one ball whose break spheres are concentric and with no planes, tensor
/// Gauss cells on the bounding box otherwise.
void integrate_supported(int n, const std::vector<Ball>& balls, const Breaks& breaks,
                         const std::function<void(std::span<const double>, std::span<double>)>& f,
                         std::span<double> out, const Cubature& rule = {});
/// Coefficientwise integral of a compactly supported form.
std::vector<double> integral_of_form(const SampledForm& u, const Cubature& rule = {});
/// L2 pairing (a, b) over supp a, with b given pointwise.
double l2_pairing(const SampledForm& a, const std::function<std::vector<double>(std::span<const double>)>& b,
                  const Cubature& rule = {});

struct PointResidual {
  std::vector<double> x;
  double residual = 0.0;
};

struct HomotopyReport {
  int n = 0, l = 0;
  std::vector<PointResidual> points;
  double max_residual = 0.0;
  double u_sup = 0.0;
};

/// dT_l u + T_{l+1} du - u (+ (int u) *theta at l = n), T_0 = 0, at each point.
HomotopyReport homotopy_check_T(const BogovskiiContext& ctx, const SampledForm& u,
                                const std::vector<std::vector<double>>& points);
/// dR_l u + R_{l+1} du - u (+ (theta, u) at l = 0), R_{n+1} = 0.
HomotopyReport homotopy_check_R(const BogovskiiContext& ctx, const SampledForm& u,
                                const std::vector<std::vector<double>>& points);

struct AdjointResult {
  double lhs = 0.0;  // (v, Q_l u)
  double rhs = 0.0;  // (T_{l+1} v, u)
  double relative_defect() const;
};

/// Both sides of (v, Q_l u) = (T_{l+1} v, u) for u of degree l, v of degree l+1.
AdjointResult adjoint_check(const BogovskiiContext& ctx, const SampledForm& u, const SampledForm& v);

struct SupportReport {
  int outside = 0;          // points outside the starlike hull
  double max_outside = 0.0;  // max |T u| there
  double u_sup = 0.0;
};

/// Evaluates T_l u at the given points and records those outside the starlike
/// hull of the support balls with respect to ctx.base.
SupportReport support_check_T(const BogovskiiContext& ctx, const SampledForm& u,
                              const std::vector<std::vector<double>>& points);

/// Deterministic low-discrepancy points in a box (shrunk by `margin` on each side).
std::vector<std::vector<double>> kronecker_points(const Box& box, int count, double margin = 0.0);

}  // namespace derham
