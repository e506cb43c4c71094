#include "derham/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "derham/errors.hpp"

namespace derham {

namespace {

void check_nvars(int n) {
  if (n < 0 || n > kMaxVars)
    throw ContractViolation("polynomial variable count " + std::to_string(n) + " outside [0, " +
                            std::to_string(kMaxVars) + "]");
}

// Zero polynomials are accepted in any ring so that default-constructed
// coefficients combine with everything.
void check_same(const RationalPoly& a, const RationalPoly& b) {
  if (a.nvars() != b.nvars() && !a.is_zero() && !b.is_zero())
    throw ContractViolation("polynomial variable counts differ (" + std::to_string(a.nvars()) + " vs " +
                            std::to_string(b.nvars()) + ")");
}

}  // namespace

RationalPoly::RationalPoly(int nvars) : nvars_(nvars) { check_nvars(nvars); }

RationalPoly RationalPoly::constant(int nvars, const Rational& c) {
  RationalPoly p(nvars);
  p.add_term(Monomial{}, c);
  return p;
}

RationalPoly RationalPoly::variable(int nvars, int var) {
  if (var < 0 || var >= nvars) throw ContractViolation("variable index out of range");
  RationalPoly p(nvars);
  Monomial m;
  m.e[var] = 1;
  p.add_term(m, 1);
  return p;
}

RationalPoly RationalPoly::monomial(int nvars, std::span<const int> alpha, const Rational& c) {
  if (static_cast<int>(alpha.size()) > nvars) throw ContractViolation("exponent vector longer than variable count");
  RationalPoly p(nvars);
  Monomial m;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0 || alpha[i] > 255) throw ContractViolation("exponent out of range");
    m.e[i] = static_cast<std::uint8_t>(alpha[i]);
  }
  p.add_term(m, c);
  return p;
}

Rational RationalPoly::constant_term() const { return coefficient(Monomial{}); }

Rational RationalPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void RationalPoly::add_term(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
  check_same(*this, o);
  if (o.is_zero()) return *this;
  nvars_ = o.nvars_;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

RationalPoly& RationalPoly::operator-=(const RationalPoly& o) {
  check_same(*this, o);
  if (o.is_zero()) return *this;
  nvars_ = o.nvars_;
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

RationalPoly& RationalPoly::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

RationalPoly operator-(const RationalPoly& a) {
  RationalPoly r = a;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  check_same(a, b);
  RationalPoly r(std::max(a.nvars_, b.nvars_));
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      for (int i = 0; i < r.nvars_; ++i) {
        const int e = ma.e[i] + mb.e[i];
        if (e > 255) throw DegreeCapExceeded("exponent overflow in polynomial product");
        m.e[i] = static_cast<std::uint8_t>(e);
      }
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

bool operator==(const RationalPoly& a, const RationalPoly& b) {
  return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
}

RationalPoly RationalPoly::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw ContractViolation("derivative: variable index out of range");
  RationalPoly r(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m.e[var] == 0) continue;
    Monomial d = m;
    d.e[var] -= 1;
    r.add_term(d, c * m.e[var]);
  }
  return r;
}

int RationalPoly::degree_in(int var) const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, int(m.e[var]));
  return d;
}

int RationalPoly::total_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.total());
  return d;
}

RationalPoly RationalPoly::integrate_unit(int var) const {
  if (var < 0 || var >= nvars_) throw ContractViolation("integrate_unit: variable index out of range");
  RationalPoly r(nvars_);
  for (const auto& [m, c] : terms_) {
    Monomial d = m;
    const int p = d.e[var];
    d.e[var] = 0;
    r.add_term(d, c / (p + 1));
  }
  return r;
}

RationalPoly RationalPoly::replace_powers(int var, std::span<const Rational> values) const {
  RationalPoly r(nvars_);
  for (const auto& [m, c] : terms_) {
    const int p = m.e[var];
    if (p >= static_cast<int>(values.size()))
      throw DegreeCapExceeded("power " + std::to_string(p) + " of variable " + std::to_string(var) +
                              " exceeds the supplied table");
    Monomial d = m;
    d.e[var] = 0;
    r.add_term(d, c * values[p]);
  }
  return r;
}

namespace {

struct HornerState {
  std::span<const RationalPoly> images;
  int out_vars;
  int cap;
};

void check_cap(const RationalPoly& p, int cap) {
  if (p.total_degree() > cap)
    throw DegreeCapExceeded("polynomial total degree " + std::to_string(p.total_degree()) + " exceeds cap " +
                            std::to_string(cap));
}

// Evaluates the polynomial made of `terms` (all sharing exponents of variables
// < var) by Horner's rule in x_var, recursing on the remaining variables.
RationalPoly horner(const std::vector<std::pair<Monomial, Rational>>& terms, int var, int nvars,
                    const HornerState& st) {
  if (terms.empty()) return RationalPoly(st.out_vars);
  if (var == nvars) {
    Rational c = 0;
    for (const auto& t : terms) c += t.second;
    return RationalPoly::constant(st.out_vars, c);
  }
  std::map<int, std::vector<std::pair<Monomial, Rational>>, std::greater<>> by_power;
  for (const auto& t : terms) by_power[t.first.e[var]].push_back(t);
  RationalPoly acc(st.out_vars);
  int current = by_power.begin()->first;
  for (auto& [p, group] : by_power) {
    for (; current > p; --current) {
      acc = acc * st.images[var];
      check_cap(acc, st.cap);
    }
    acc += horner(group, var + 1, nvars, st);
  }
  for (; current > 0; --current) {
    acc = acc * st.images[var];
    check_cap(acc, st.cap);
  }
  return acc;
}

}  // namespace

RationalPoly RationalPoly::substitute(std::span<const RationalPoly> images, int degree_cap) const {
  if (static_cast<int>(images.size()) != nvars_)
    throw ContractViolation("substitute: need one image per variable");
  const int out_vars = images.empty() ? nvars_ : images[0].nvars();
  for (const auto& img : images)
    if (img.nvars() != out_vars) throw ContractViolation("substitute: images live in different rings");
  std::vector<std::pair<Monomial, Rational>> all(terms_.begin(), terms_.end());
  HornerState st{images, out_vars, degree_cap};
  RationalPoly r = horner(all, 0, nvars_, st);
  check_cap(r, degree_cap);
  return r;
}

RationalPoly RationalPoly::widened(int nvars) const {
  if (nvars < nvars_) throw ContractViolation("widened: cannot reduce variable count");
  RationalPoly r = *this;
  r.nvars_ = nvars;
  check_nvars(nvars);
  return r;
}

RationalPoly RationalPoly::narrowed(int nvars) const {
  check_nvars(nvars);
  RationalPoly r(nvars);
  for (const auto& [m, c] : terms_) {
    for (int i = nvars; i < nvars_; ++i)
      if (m.e[i]) throw ContractViolation("narrowed: variable " + std::to_string(i) + " still occurs");
    r.terms_.emplace(m, c);
  }
  return r;
}

Rational RationalPoly::evaluate(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) < nvars_) throw ContractViolation("evaluate: too few coordinates");
  Rational acc = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < nvars_; ++i)
      if (m.e[i]) t *= pow(x[i], m.e[i]);
    acc += t;
  }
  return acc;
}

double RationalPoly::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) < nvars_) throw ContractViolation("evaluate: too few coordinates");
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d();
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < m.e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

std::string RationalPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    std::string coef = derham::to_string(abs(c));
    if (s.empty())
      s += (sgn(c) < 0 ? "-" : "");
    else
      s += (sgn(c) < 0 ? " - " : " + ");
    std::string mono;
    for (int i = 0; i < nvars_; ++i) {
      if (!m.e[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (m.e[i] > 1) mono += "^" + std::to_string(m.e[i]);
    }
    if (mono.empty())
      s += coef;
    else if (coef == "1")
      s += mono;
    else
      s += coef + "*" + mono;
  }
  return s;
}

RationalPoly pow(const RationalPoly& p, int e, int degree_cap) {
  if (e < 0) throw ContractViolation("negative polynomial power");
  RationalPoly r = RationalPoly::constant(p.nvars(), 1);
  for (int i = 0; i < e; ++i) {
    r = r * p;
    check_cap(r, degree_cap);
  }
  return r;
}

}  // namespace derham
