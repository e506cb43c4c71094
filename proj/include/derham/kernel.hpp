#pragma once

// The kernel G_l(x, y) = int_1^inf (t-1)^{n-l} t^{l-1} theta(y + t(x-y)) dt
// behind T_l u(x) = int G_l(x, y) (x-y) ⌟ u(y) dy, in its defining form and
// as the finite sum of homogeneous functions of z = x - y:
//   G_l(x, y) = sum_k C(l-1, k) |z|^{k-n} int_0^inf r^{n-k-1} theta(x + r z/|z|) dr.
// Along a line theta is one polynomial piece, so both are exact Gauss rules.

#include <cstdint>
#include <span>
#include <vector>

#include "derham/smoothing_kernel.hpp"

namespace derham {

inline constexpr double kSingularFloor = 1e-12;

/// Defining t-integral. Throws SingularEvaluation when |x - y| < floor.
double kernel_G(const ThetaBump& theta, int l, std::span<const double> x, std::span<const double> y,
                double floor = kSingularFloor);
/// Homogeneous-sum form of the same kernel.
double kernel_G_homogeneous(const ThetaBump& theta, int l, std::span<const double> x, std::span<const double> y,
                            double floor = kSingularFloor);
/// A_k(w) = int_0^inf r^{n-k-1} theta(x + r w) dr for unit w.
double radial_profile(const ThetaBump& theta, int k, std::span<const double> x, std::span<const double> w);

struct KernelAgreement {
  int pairs = 0;
  double max_relative = 0.0;
  int nonzero = 0;  // pairs with G != 0
};

/// Compares both forms at `pairs` random (x, y) drawn around supp theta,
/// rejecting |x - y| below 1e-3 (so the pairs stay admissible).
KernelAgreement kernel_agreement(const ThetaBump& theta, int l, int pairs, std::uint64_t seed);

struct WeakSingularityScan {
  int l = 0;
  double rho_max = 0.0;
  int directions = 0, radii = 0;
  std::vector<std::vector<double>> points;  // x
  std::vector<double> constant;             // C(x) = sup |G (x-y)| |x-y|^{n-1}
  std::vector<double> constant_refined;     // same on the doubled grid
  std::vector<double> limit;                // sup_w A_0(w), the rho -> 0 value
  double max_change = 0.0;                  // max relative change under refinement
  double sup_constant = 0.0;
};

/// Scans |G_l(x, y)(x - y)| |x - y|^{n-1} over y = x - rho w, rho log-spaced in
/// [1e-6, rho_max], on two direction/radius grids. Directions are aimed at the
/// cone subtended by B when x lies outside it (n = 2, 3). directions = 0
/// picks 64 in 2D and 1024 otherwise.
WeakSingularityScan weak_singularity_scan(const ThetaBump& theta, int l, const std::vector<std::vector<double>>& points,
                                          double rho_max, int directions = 0, int radii = 25);

/// Unit directions: equispaced angles in 2D, a Fibonacci lattice otherwise.
std::vector<std::vector<double>> sphere_directions(int n, int count);

/// count unit vectors in the cap of the given half-angle around a unit axis (n = 2, 3).
std::vector<std::vector<double>> cap_directions(std::span<const double> axis, double half_angle, int count);

}  // namespace derham
