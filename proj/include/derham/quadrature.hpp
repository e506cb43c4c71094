#pragma once

#include <functional>
#include <span>
#include <vector>

#include "derham/geometry.hpp"

namespace derham {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], increasing
  std::vector<double> weights;
};

/// Gauss-Legendre rule with q points (1 <= q <= 128), cached.
const GaussRule& gauss_legendre(int q);

struct QuadratureRule {
  int points = 16;         // per axis / per panel
  int max_depth = 40;      // 1D bisection depth, or patch budget scale in several dimensions
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
};

/// Fixed q-point rule on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int q);

/// Composite rule with `panels` equal panels of q points.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int q, int panels);

/// Globally adaptive bisection; the error estimate compares a q-point and a
/// (q/2+1)-point rule on each panel. Throws QuadratureError when the depth or
/// panel budget runs out.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureRule& rule = {});

/// Tensor-product Gauss-Legendre on a box with `panels` equal panels per axis.
/// The integrand writes `out.size()` components; results are accumulated.
void integrate_box(const std::function<void(std::span<const double>, std::span<double>)>& f, const Box& box,
                   int q, int panels, std::span<double> out);
double integrate_box(const std::function<double(std::span<const double>)>& f, const Box& box, int q, int panels);

/// Tensor-product rule on a box split along the given axis breakpoints
/// (per-axis sorted lists, endpoints included), q points per cell and axis.
void integrate_box_cells(const std::function<void(std::span<const double>, std::span<double>)>& f,
                         const std::vector<std::vector<double>>& breaks, int q, std::span<double> out);

}  // namespace derham
