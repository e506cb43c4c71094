#pragma once

#include <span>
#include <string>
#include <vector>

namespace derham {

struct Ball {
  std::vector<double> center;
  double radius = 0.0;

  int dimension() const { return static_cast<int>(center.size()); }
  bool contains(std::span<const double> x, double tol = 0.0) const;
};

struct Box {
  std::vector<double> lo, hi;

  int dimension() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x, double tol = 0.0) const;
  double volume() const;
  std::vector<double> center() const;
  Ball circumscribed() const;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

/// Parameter interval {t : |x + t w - c| <= R}; empty if the line misses.
Interval line_ball(std::span<const double> x, std::span<const double> w, const Ball& b);
/// Parameter interval {t : x + t w in box} (slab method).
Interval line_box(std::span<const double> x, std::span<const double> w, const Box& b);

Interval intersect(Interval a, Interval b);

double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Distance-like test for the convex hull of two balls: min over lambda in
/// [0, 1] of |x - c(lambda)| - R(lambda) with linearly interpolated centre and
/// radius. Non-positive inside the hull.
double hull_gap(std::span<const double> x, const Ball& a, const Ball& b);

/// Starlike hull of a ball D with respect to a ball B (equal to conv(B u D)).
bool in_starlike_hull(std::span<const double> x, const Ball& support, const Ball& base, double tol = 0.0);

std::string to_string(std::span<const double> x);

}  // namespace derham
