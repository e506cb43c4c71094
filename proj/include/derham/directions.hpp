#pragma once

// Integration over the unit directions omega that point from x into a box.
//
// Directions are parametrised by points s on the box faces that a ray from x
// crosses exactly once (exit faces when x is inside, entry faces otherwise):
//   omega = (s - x)/|s - x|,  d omega = h |s - x|^{-n} dA(s),
// h being the distance from x to the face plane. Each face is refined
// adaptively with a q-point / lower-order Gauss-Legendre pair.

#include <functional>
#include <span>
#include <vector>

#include "derham/geometry.hpp"

namespace derham {

struct DirectionRule {
  int q_high = 0;  // 0: pick by dimension
  int q_low = 0;
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  int max_patches = 40000;
};

struct DirectionStats {
  int patches = 0;
  long evaluations = 0;
  double error_estimate = 0.0;
};

/// The integrand is known to vanish unless the ray x + t omega, with t of the
/// given sign, meets the ball. Targets sharing a group are alternatives; a
/// direction must hit some target of every group. Patches missing that are
/// skipped, the rest are pre-refined to resolve the cones.
struct DirectionTarget {
  Ball ball;
  int sign = 1;
  int group = 0;
};

using DirectionIntegrand = std::function<void(std::span<const double> omega, std::span<double> out)>;

/// Integral over the directions that hit `box` from x of f(omega) (m
/// components). Throws QuadratureError if the patch budget runs out.
std::vector<double> integrate_directions(std::span<const double> x, const Box& box, std::size_t m,
                                         const DirectionIntegrand& f, std::span<const DirectionTarget> targets = {},
                                         const DirectionRule& rule = {},
                                         DirectionStats* stats = nullptr);

}  // namespace derham
