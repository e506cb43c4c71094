#pragma once

// Sparse multivariate polynomials with exact rational coefficients.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "derham/rational.hpp"

namespace derham {

inline constexpr int kMaxVars = 24;
inline constexpr int kDefaultDegreeCap = 16;

struct Monomial {
  std::array<std::uint8_t, kMaxVars> e{};

  int total() const {
    int s = 0;
    for (auto v : e) s += v;
    return s;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

class RationalPoly {
 public:
  using Map = std::map<Monomial, Rational>;

  RationalPoly() = default;
  explicit RationalPoly(int nvars);

  static RationalPoly constant(int nvars, const Rational& c);
  static RationalPoly variable(int nvars, int var);
  static RationalPoly monomial(int nvars, std::span<const int> alpha, const Rational& c);

  int nvars() const { return nvars_; }
  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of the constant monomial.
  Rational constant_term() const;
  Rational coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const Rational& c);

  RationalPoly& operator+=(const RationalPoly& o);
  RationalPoly& operator-=(const RationalPoly& o);
  RationalPoly& operator*=(const Rational& s);
  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
  friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) { return a -= b; }
  friend RationalPoly operator-(const RationalPoly& a);
  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator*(const Rational& s, RationalPoly a) { return a *= s; }
  friend RationalPoly operator*(RationalPoly a, const Rational& s) { return a *= s; }
  friend bool operator==(const RationalPoly& a, const RationalPoly& b);

  RationalPoly derivative(int var) const;
  int degree_in(int var) const;  // -1 for the zero polynomial
  int total_degree() const;      // -1 for the zero polynomial

  /// Integral over var in [0, 1]; the variable disappears from every monomial.
  RationalPoly integrate_unit(int var) const;
  /// Replaces x_var^p by values[p] (values must cover degree_in(var)).
  RationalPoly replace_powers(int var, std::span<const Rational> values) const;

  /// Simultaneous substitution x_i -> images[i] (all images share one variable
  /// count). Nested Horner evaluation; throws DegreeCapExceeded past cap.
  RationalPoly substitute(std::span<const RationalPoly> images, int degree_cap = kDefaultDegreeCap) const;

  /// Same polynomial viewed in a ring with more (or equally many) variables.
  RationalPoly widened(int nvars) const;
  /// Drops variables >= nvars; they must not occur.
  RationalPoly narrowed(int nvars) const;

  Rational evaluate(std::span<const Rational> x) const;
  double evaluate(std::span<const double> x) const;

  std::string to_string() const;

 private:
  int nvars_ = 0;
  Map terms_;
};

inline bool is_zero(const RationalPoly& p) { return p.is_zero(); }

RationalPoly pow(const RationalPoly& p, int e, int degree_cap = kDefaultDegreeCap);

}  // namespace derham
