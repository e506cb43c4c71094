#pragma once

// The scalar component operator Ku(x) = int k(x, x-y) u(y) dy of T_l, with
//   k(x, z) = z_j int_0^inf s^{n-l} (s+1)^{l-1} theta(x + s z) ds = z_j G_l(x, x-z),
// split at s = 1 into a smooth part k0 and a weakly singular part k1 whose
// Fourier transform in z is
//   k1^(x, xi) = int_0^1 (t+1)^{l-1} e^{it<xi,x>} (i d_j theta^(t xi) - x_j theta^(t xi)) dt.
// For |xi| >= 1 the t-integral is taken as tau = t|xi| on unit panels.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "derham/smoothing_kernel.hpp"

namespace derham {

struct SymbolProbe {
  ThetaBump theta;
  int l = 1;
  int j = 1;               // component, 1-based
  double tau_max = 400.0;  // truncation of the tau-integral (theta^ tail)
  int panel_points = 10;   // Gauss points per unit tau-panel
  double fd_relative = 1e-3;  // xi-step h = fd_relative (1 + |xi|)

  SymbolProbe(ThetaBump t, int l_, int j_);
  int dimension() const { return theta.dimension(); }
};

std::complex<double> symbol_k1hat(const SymbolProbe& p, std::span<const double> x, std::span<const double> xi);
/// k1^ at one xi for many x (theta^ evaluated once).
std::vector<std::complex<double>> symbol_k1hat_batch(const SymbolProbe& p, const std::vector<std::vector<double>>& xs,
                                                     std::span<const double> xi);
/// d/dx_i k1^ for all i, same batching; row per x.
std::vector<std::vector<std::complex<double>>> symbol_k1hat_dx_batch(const SymbolProbe& p,
                                                                     const std::vector<std::vector<double>>& xs,
                                                                     std::span<const double> xi);
/// -x_j (2^l - 1) / l, the value at xi = 0 for theta with int theta = 1 and
/// vanishing first moments.
double symbol_at_zero(const SymbolProbe& p, std::span<const double> x);

double kernel_k(const SymbolProbe& p, std::span<const double> x, std::span<const double> z);
double smooth_part_k0(const SymbolProbe& p, std::span<const double> x, std::span<const double> z);
double singular_part_k1(const SymbolProbe& p, std::span<const double> x, std::span<const double> z);

struct ScanGrid {
  int directions = 8;
  double angle_offset = 0.1;  // 2D rays at 2 pi k / directions + offset
  double xi_min = 1.0, xi_max = 1000.0;
  int per_decade = 10;
  double plateau_from = 100.0;  // growth measured over [plateau_from, xi_max]
  double plateau_tol = 0.01;
  std::vector<std::vector<double>> xs;

  /// 5 x 5 (2D) or 3^n x-grid on [-2, 2]^n.
  static ScanGrid standard(int n);
  std::vector<std::vector<double>> ray_directions(int n) const;
  std::vector<double> radii() const;
};

struct DecayReport {
  int n = 0, l = 0, j = 0;
  std::vector<double> xi;           // |xi| grid
  std::vector<double> E0, E1, Ex;   // sup over rays and x at each |xi|
  std::vector<double> E0_run, E1_run, Ex_run;  // running sups
  double growth0 = 0.0, growth1 = 0.0, growthx = 0.0;
  bool plateau0 = false, plateau1 = false, plateaux = false;
  // sup_{|xi|} |k1^|(1+|xi|) over nested boxes |x|_inf <= R, with the ratio to 1 + R sqrt(n)
  std::vector<double> box_radius, box_constant, box_ratio;
  double zero_error = 0.0;  // max |k1^(x, 0) - symbol_at_zero| over the x-grid
  bool ok() const { return plateau0 && plateau1; }
};

DecayReport decay_scan(const SymbolProbe& p, const ScanGrid& grid);

struct ConsistencyRule {
  double xi_cutoff = 0.0;  // 0: 200 / r_theta
  int angular = 512;
  int radial_points = 10;  // per unit radial panel in xi
  int k0_panels = 16;      // per axis of supp u
  int k0_points = 8;
};

struct ConsistencyPoint {
  std::vector<double> x;
  double direct = 0.0, split = 0.0, split_imag = 0.0, relative = 0.0;
};

struct ConsistencyReport {
  double xi_cutoff = 0.0;
  std::vector<ConsistencyPoint> points;
  double max_relative = 0.0;
};

/// Ku(x) by polar quadrature of the kernel against u, and by
/// int k0(x, x-y) u(y) dy + (2 pi)^{-n} int_{|xi| < cutoff} e^{i<xi,x>} k1^(x, xi) u^(xi) dxi.
/// n = 2; u is a tensor bump (closed-form u^).
ConsistencyReport operator_consistency(const SymbolProbe& p, const ThetaBump& u,
                                       const std::vector<std::vector<double>>& points, const ConsistencyRule& rule = {});
/// The first (polar kernel) route alone.
double apply_K(const SymbolProbe& p, const ThetaBump& u, std::span<const double> x);

}  // namespace derham
