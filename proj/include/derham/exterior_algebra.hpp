#pragma once

// Exterior algebra of R^n with the standard orientation dx_1 ^ ... ^ dx_n.
//
// Blades are canonical (strictly increasing indices), elements are sparse maps
// from blades to coefficients in an arbitrary commutative scalar ring S. All
// signs come from counting transpositions against the canonical order.

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "derham/errors.hpp"
#include "derham/rational.hpp"

namespace derham {

/// Default upper bound on the ambient dimension; blade tables grow as 2^n.
inline constexpr int kDefaultMaxDimension = 8;
/// Hard limit imposed by the 32-bit blade mask.
inline constexpr int kHardMaxDimension = 24;

int max_dimension();
void set_max_dimension(int n);

/// dx_{j_1} ^ ... ^ dx_{j_l} with 1 <= j_1 < ... < j_l <= n, stored as a bitmask
/// (bit i-1 set <=> index i present).
class Blade {
 public:
  Blade() = default;

  static Blade from_indices(int n, std::span<const int> indices);
  static Blade from_indices(int n, std::initializer_list<int> indices) {
    std::vector<int> v(indices);
    return from_indices(n, std::span<const int>(v));
  }
  static Blade from_mask(int n, std::uint32_t mask);
  static Blade scalar(int n) { return from_mask(n, 0u); }
  static Blade volume(int n) { return from_mask(n, n == 32 ? ~0u : ((1u << n) - 1u)); }

  int dimension() const { return n_; }
  int degree() const { return std::popcount(mask_); }
  std::uint32_t mask() const { return mask_; }
  bool contains(int index) const { return (mask_ >> (index - 1)) & 1u; }
  std::vector<int> indices() const;
  Blade complement() const { return from_mask(n_, Blade::volume(n_).mask_ & ~mask_); }
  std::string to_string() const;

  friend bool operator==(const Blade&, const Blade&) = default;
  friend std::strong_ordering operator<=>(const Blade& a, const Blade& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return a.mask_ <=> b.mask_;
  }

 private:
  int n_ = 0;
  std::uint32_t mask_ = 0;
};

/// Sign of a ^ b relative to the canonical blade for mask(a)|mask(b); 0 if the
/// blades share an index.
int wedge_sign(std::uint32_t a, std::uint32_t b);

/// All blades of degree l in dimension n, in increasing mask order.
std::vector<Blade> blades_of_degree(int n, int l);

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// Zero tests for the scalar rings in use. Further rings add an overload.
inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(int v) { return v == 0; }
inline bool is_zero(const Rational& v) { return sgn(v) == 0; }

template <class S>
class ExtElement {
 public:
  using Map = std::map<Blade, S>;

  ExtElement() = default;
  ExtElement(int n, int degree) : n_(n), degree_(degree) {
    if (n < 0 || n > max_dimension())
      throw ContractViolation("dimension " + std::to_string(n) + " outside [0, " +
                              std::to_string(max_dimension()) + "]");
  }

  static ExtElement from_blade(const Blade& b, S coefficient) {
    ExtElement e(b.dimension(), b.degree());
    e.add(b, std::move(coefficient));
    return e;
  }
  static ExtElement scalar(int n, S value) { return from_blade(Blade::scalar(n), std::move(value)); }

  int dimension() const { return n_; }
  int degree() const { return degree_; }
  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of b, or a default-constructed (zero) scalar.
  S coefficient(const Blade& b) const {
    auto it = terms_.find(b);
    return it == terms_.end() ? S{} : it->second;
  }

  void add(const Blade& b, const S& value) {
    check_blade(b);
    if (is_zero(value)) return;
    auto [it, inserted] = terms_.try_emplace(b, value);
    if (!inserted) {
      it->second = it->second + value;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }
  void subtract(const Blade& b, const S& value) { add(b, -value); }

  ExtElement& operator+=(const ExtElement& o) {
    check_same_shape(o);
    for (const auto& [b, c] : o.terms_) add(b, c);
    return *this;
  }
  ExtElement& operator-=(const ExtElement& o) {
    check_same_shape(o);
    for (const auto& [b, c] : o.terms_) add(b, -c);
    return *this;
  }
  friend ExtElement operator+(ExtElement a, const ExtElement& b) { return a += b; }
  friend ExtElement operator-(ExtElement a, const ExtElement& b) { return a -= b; }
  friend ExtElement operator-(const ExtElement& a) {
    ExtElement r(a.n_, a.degree_);
    for (const auto& [b, c] : a.terms_) r.terms_.emplace(b, -c);
    return r;
  }

  /// Coefficientwise map; zero results are dropped.
  template <class F>
  ExtElement transform(F&& f) const {
    ExtElement r(n_, degree_);
    for (const auto& [b, c] : terms_) r.add(b, f(c));
    return r;
  }

  ExtElement scaled(const S& s) const {
    return transform([&](const S& c) { return s * c; });
  }

  friend bool operator==(const ExtElement& a, const ExtElement& b) {
    return a.n_ == b.n_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

 private:
  void check_blade(const Blade& b) const {
    if (b.dimension() != n_ || b.degree() != degree_)
      throw ContractViolation("blade " + b.to_string() + " does not match element (n=" +
                              std::to_string(n_) + ", l=" + std::to_string(degree_) + ")");
  }
  void check_same_shape(const ExtElement& o) const {
    if (o.n_ != n_ || o.degree_ != degree_)
      throw ContractViolation("shape mismatch in exterior-algebra sum");
  }

  int n_ = 0;
  int degree_ = 0;
  Map terms_;
};

template <class S>
ExtElement<S> wedge(const ExtElement<S>& u, const ExtElement<S>& v) {
  if (u.dimension() != v.dimension()) throw ContractViolation("wedge: dimension mismatch");
  const int n = u.dimension();
  ExtElement<S> r(n, u.degree() + v.degree());
  if (u.degree() + v.degree() > n) return r;
  for (const auto& [bu, cu] : u.terms()) {
    for (const auto& [bv, cv] : v.terms()) {
      const int s = wedge_sign(bu.mask(), bv.mask());
      if (s == 0) continue;
      const Blade b = Blade::from_mask(n, bu.mask() | bv.mask());
      if (s > 0)
        r.add(b, cu * cv);
      else
        r.add(b, -(cu * cv));
    }
  }
  return r;
}

/// a ⌟ u for a 1-vector a: sum_k (-1)^(k-1) a_{j_k} dx_{j_1}..^dx_{j_k}..dx_{j_l}.
template <class S>
ExtElement<S> contract(const ExtElement<S>& a, const ExtElement<S>& u) {
  if (a.dimension() != u.dimension()) throw ContractViolation("contract: dimension mismatch");
  if (a.degree() != 1) throw ContractViolation("contract: first argument must have degree 1");
  const int n = u.dimension();
  ExtElement<S> r(n, u.degree() - 1);
  if (u.degree() == 0) return r;
  for (const auto& [b, c] : u.terms()) {
    int k = 0;
    for (int j = 1; j <= n; ++j) {
      if (!b.contains(j)) continue;
      const S aj = a.coefficient(Blade::from_mask(n, 1u << (j - 1)));
      if (!is_zero(aj)) {
        const Blade rest = Blade::from_mask(n, b.mask() & ~(1u << (j - 1)));
        if (k % 2 == 0)
          r.add(rest, aj * c);
        else
          r.add(rest, -(aj * c));
      }
      ++k;
    }
  }
  return r;
}

template <class S>
S inner(const ExtElement<S>& u, const ExtElement<S>& v) {
  if (u.dimension() != v.dimension() || u.degree() != v.degree())
    throw ContractViolation("inner: degree or dimension mismatch");
  S acc{};
  for (const auto& [b, c] : u.terms()) {
    auto it = v.terms().find(b);
    if (it != v.terms().end()) acc = acc + c * it->second;
  }
  return acc;
}

/// Hodge star normalised by b ^ *b = dx_1 ^ ... ^ dx_n.
template <class S>
ExtElement<S> hodge_star(const ExtElement<S>& u) {
  const int n = u.dimension();
  ExtElement<S> r(n, n - u.degree());
  if (u.degree() < 0 || u.degree() > n) return r;
  for (const auto& [b, c] : u.terms()) {
    const Blade bc = b.complement();
    if (wedge_sign(b.mask(), bc.mask()) > 0)
      r.add(bc, c);
    else
      r.add(bc, -c);
  }
  return r;
}

/// Inverse Hodge star: *^{-1} = (-1)^{l(n-l)} * on l-forms.
template <class S>
ExtElement<S> hodge_star_inverse(const ExtElement<S>& u) {
  const int l = u.degree(), n = u.dimension();
  ExtElement<S> s = hodge_star(u);
  return ((l * (n - l)) % 2 == 0) ? s : -s;
}

/// Dense coefficient layout for numeric l-forms: blades of degree l in
/// increasing mask order, with precomputed contraction and wedge tables.
struct DenseLayout {
  struct Entry {
    int axis;    // 0-based coordinate index
    int target;  // index in the neighbouring degree's layout
    int sign;
  };

  int n = 0;
  int degree = 0;
  std::vector<std::uint32_t> masks;
  std::vector<int> index_of_mask;              // -1 if not of this degree
  std::vector<std::vector<Entry>> contraction;  // per blade: terms of e_axis ⌟ blade
  std::vector<std::vector<Entry>> wedge_axis;   // per blade: dx_axis ^ blade

  std::size_t size() const { return masks.size(); }
};

/// Cached layout for (n, l); empty layout when l is outside [0, n].
const DenseLayout& dense_layout(int n, int l);

/// out += w * (a ⌟ u) for dense u of degree l (out has degree l-1).
void contract_dense(int n, int l, std::span<const double> a, std::span<const double> u,
                    std::span<double> out, double w = 1.0);

/// out += w * (a ^ u) for a 1-form a and dense l-form u.
void wedge_one_form_dense(int n, int l, std::span<const double> a, std::span<const double> u,
                          std::span<double> out, double w = 1.0);

/// Dense Hodge star: out (degree n-l) = *u.
void hodge_star_dense(int n, int l, std::span<const double> u, std::span<double> out);

/// Conversions between sparse and dense numeric forms.
std::vector<double> to_dense(const ExtElement<double>& u);
ExtElement<double> from_dense(int n, int l, std::span<const double> coeffs);

}  // namespace derham
