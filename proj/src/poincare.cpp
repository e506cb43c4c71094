#include "derham/poincare.hpp"

#include <algorithm>

#include "derham/errors.hpp"

namespace derham {

namespace {

void check_coordinates(const PolyForm& u, const char* where) {
  if (coefficient_vars(u) != u.dimension())
    throw ContractViolation(std::string(where) + ": coefficients must use exactly the n coordinates");
}

// (l-1+|m|)! (|a|-|m|)! / (l+|a|)!
Rational beta_weight(int l, int m, int a) {
  Rational w(factorial(l - 1 + m) * factorial(a - m), factorial(l + a));
  w.canonicalize();
  return w;
}

// Moment lookup keyed by the exponent vector of the a-variables.
class MomentTable {
 public:
  MomentTable(const ThetaBump& theta, int cap) : theta_(theta), cap_(cap) {}
  Rational operator()(std::span<const int> alpha) const {
    int total = 0;
    for (int v : alpha) total += v;
    if (total > cap_)
      throw DegreeCapExceeded("moment of order " + std::to_string(total) + " exceeds the moment cap " +
                              std::to_string(cap_));
    return theta_.moment(alpha);
  }

 private:
  const ThetaBump& theta_;
  int cap_;
};

// Enumerates multi-indices m <= alpha componentwise.
template <class F>
void for_each_below(const std::vector<int>& alpha, F&& f) {
  std::vector<int> m(alpha.size(), 0);
  while (true) {
    f(m);
    std::size_t i = 0;
    while (i < m.size() && ++m[i] > alpha[i]) m[i++] = 0;
    if (i == m.size()) return;
  }
}

// Replaces every a^beta (variables n..2n-1) by the moment M_beta.
PolyForm average_parameters(const PolyForm& u, int n, const MomentTable& moments) {
  PolyForm r(n, u.degree());
  std::vector<int> beta(n);
  for (const auto& [b, c] : u.terms()) {
    RationalPoly acc(n);
    for (const auto& [mono, q] : c.terms()) {
      Monomial x{};
      for (int i = 0; i < n; ++i) {
        x.e[i] = mono.e[i];
        beta[i] = mono.e[n + i];
      }
      acc.add_term(x, q * moments(beta));
    }
    r.add(b, acc);
  }
  return r;
}

// (x - a) ⌟ int_0^1 t^{l-1} u(a + t(x - a)) dt with a given by polynomials in
// nv variables; variable tvar (< nv) is the path parameter.
PolyForm unregularized_core(const PolyForm& u, std::span<const RationalPoly> a, int nv, int tvar, int cap) {
  const int n = u.dimension();
  const int l = u.degree();
  const RationalPoly t = RationalPoly::variable(nv, tvar);
  std::vector<RationalPoly> images;
  for (int i = 0; i < n; ++i) images.push_back(a[i] + t * (RationalPoly::variable(nv, i) - a[i]));
  const RationalPoly tl = pow(t, l - 1, cap + l);
  PolyForm pulled(n, l);
  for (const auto& [b, c] : u.terms())
    pulled.add(b, (c.narrowed(n).substitute(images, cap + l) * tl).integrate_unit(tvar));
  return contract(position_minus(n, a, nv), pulled);
}

}  // namespace

PoincareContext::PoincareContext(ThetaBump t, int cap) : theta(std::move(t)), base(theta.support_ball()), moment_cap(cap) {}

Rational theta_pair(const ThetaBump& theta, const PolyForm& u) {
  if (u.degree() != 0) throw ContractViolation("theta_pair needs a 0-form");
  check_coordinates(u, "theta_pair");
  Rational acc = 0;
  std::vector<int> alpha(u.dimension());
  for (const auto& [b, c] : u.terms())
    for (const auto& [m, q] : c.terms()) {
      for (int i = 0; i < u.dimension(); ++i) alpha[i] = m.e[i];
      acc += q * theta.moment(alpha);
    }
  return acc;
}

Rational extended_R0(const PoincareContext& ctx, const PolyForm& u) { return theta_pair(ctx.theta, u); }

PolyForm poincare_R(const PoincareContext& ctx, const PolyForm& u) {
  const int n = u.dimension();
  const int l = u.degree();
  if (n != ctx.dimension()) throw ContractViolation("poincare_R: dimension differs from theta");
  if (l < 1 || l > n) throw ContractViolation("poincare_R: degree must lie in 1..n");
  check_coordinates(u, "poincare_R");
  if (total_degree(u) + 1 > ctx.moment_cap)
    throw DegreeCapExceeded("poincare_R: degree " + std::to_string(total_degree(u)) +
                            " needs moments beyond the cap " + std::to_string(ctx.moment_cap));
  const MomentTable moments(ctx.theta, ctx.moment_cap);

  PolyForm r(n, l - 1);
  std::vector<int> alpha(n), shifted(n);
  for (const auto& [blade, coeff] : u.terms()) {
    const auto J = blade.indices();
    // P_j for each j in J, accumulated as polynomials in x
    std::vector<RationalPoly> P(J.size(), RationalPoly(n));
    for (const auto& [mono, c] : coeff.terms()) {
      int abs_alpha = 0;
      for (int i = 0; i < n; ++i) {
        alpha[i] = mono.e[i];
        abs_alpha += alpha[i];
      }
      for_each_below(alpha, [&](const std::vector<int>& m) {
        Rational w = c;
        int abs_m = 0;
        Monomial xm{};
        for (int i = 0; i < n; ++i) {
          w *= Rational(binomial_z(alpha[i], m[i]));
          abs_m += m[i];
          xm.e[i] = static_cast<std::uint8_t>(m[i]);
          shifted[i] = alpha[i] - m[i];
        }
        w *= beta_weight(l, abs_m, abs_alpha);
        const Rational base = moments(shifted);
        for (std::size_t p = 0; p < J.size(); ++p) {
          const int j = J[p] - 1;
          // w x^m (x_j M_{alpha-m} - M_{alpha-m+e_j})
          Monomial xmj = xm;
          ++xmj.e[j];
          P[p].add_term(xmj, w * base);
          ++shifted[j];
          P[p].add_term(xm, -w * moments(shifted));
          --shifted[j];
        }
      });
    }
    for (std::size_t p = 0; p < J.size(); ++p) {
      const Blade rest = Blade::from_mask(n, blade.mask() & ~(1u << (J[p] - 1)));
      if (p % 2 == 0)
        r.add(rest, P[p]);
      else
        r.add(rest, -P[p]);
    }
  }
  return r;
}

PolyForm poincare_unregularized(std::span<const Rational> a, const PolyForm& u) {
  const int n = u.dimension();
  if (static_cast<int>(a.size()) != n) throw ContractViolation("poincare_unregularized: base point dimension");
  if (u.degree() < 1) throw ContractViolation("poincare_unregularized: degree must be at least 1");
  check_coordinates(u, "poincare_unregularized");
  const int nv = n + 1;
  std::vector<RationalPoly> ap;
  for (int i = 0; i < n; ++i) ap.push_back(RationalPoly::constant(nv, a[i]));
  return narrow(unregularized_core(u, ap, nv, n, 1 << 20), n);
}

PolyForm poincare_unregularized_symbolic(const PolyForm& u, int degree_cap) {
  const int n = u.dimension();
  if (u.degree() < 1) throw ContractViolation("poincare_unregularized: degree must be at least 1");
  check_coordinates(u, "poincare_unregularized");
  const int nv = 2 * n + 1;
  std::vector<RationalPoly> ap;
  for (int i = 0; i < n; ++i) ap.push_back(RationalPoly::variable(nv, n + i));
  return narrow(unregularized_core(u, ap, nv, 2 * n, std::max(degree_cap, 2 * total_degree(u) + 2)), 2 * n);
}

PolyForm poincare_R_averaged(const PoincareContext& ctx, const PolyForm& u) {
  const int n = u.dimension();
  if (u.degree() < 1 || u.degree() > n) throw ContractViolation("poincare_R: degree must lie in 1..n");
  const PolyForm sym = poincare_unregularized_symbolic(u);
  return average_parameters(sym, n, MomentTable(ctx.theta, ctx.moment_cap));
}

PolyForm homotopy_defect_R(const PoincareContext& ctx, const PolyForm& u) {
  const int n = u.dimension();
  const int l = u.degree();
  check_coordinates(u, "homotopy_defect_R");
  PolyForm defect = -u;
  if (l >= 1) defect += exterior_d(poincare_R(ctx, u));
  if (l < n) {
    const PolyForm du = exterior_d(u);
    if (!du.empty()) defect += poincare_R(ctx, du);
  }
  if (l == 0) defect += scalar_form(n, RationalPoly::constant(n, theta_pair(ctx.theta, u)));
  return widen(defect, n);
}

QPreservationReport check_qspace_preservation(const PoincareContext& ctx, const std::vector<QSpaceSpec>& complex,
                                              int l) {
  if (l < 1 || l >= static_cast<int>(complex.size()))
    throw ContractViolation("check_qspace_preservation: degree outside the complex");
  const QSpaceSpec& src = complex[l];
  const QSpaceSpec& dst = complex[l - 1];
  if (src.degree != l || dst.degree != l - 1 || src.n != ctx.dimension())
    throw ContractViolation("check_qspace_preservation: complex does not match the context");

  QPreservationReport rep;
  rep.n = src.n;
  rep.l = l;
  int p = 0;
  for (const auto& [b, bounds] : complex[0].bounds)
    for (int v : bounds) p = std::max(p, v);
  rep.p = p;

  const int n = src.n;
  std::vector<Rational> s(n, Rational(3, 2)), shift(n);
  for (int i = 0; i < n; ++i) shift[i] = Rational(i + 1, 3);
  std::vector<Rational> ones(n, Rational(1)), zero(n, Rational(0));

  for (const PolyForm& e : qspace_basis(src)) {
    ++rep.checked;
    const PolyForm image = poincare_R(ctx, e);
    if (qspace_membership(image, dst))
      ++rep.preserved;
    else
      rep.failures.push_back("R maps " + to_string(e) + " to " + to_string(image) + " outside " + dst.describe());
    if (!qspace_membership(koszul(e), dst)) {
      rep.koszul_closed = false;
      rep.failures.push_back("x⌟ maps " + to_string(e) + " outside " + dst.describe());
    }
    if (!qspace_membership(pullback_scale_shift(e, s, zero), src) ||
        !qspace_membership(pullback_scale_shift(e, ones, shift), src)) {
      rep.affine_invariant = false;
      rep.failures.push_back("affine pullback of " + to_string(e) + " leaves " + src.describe());
    }
  }
  return rep;
}

NotClosedError::NotClosedError(PolyForm residual)
    : std::runtime_error("form is not closed: du = " + to_string(residual)), residual_(std::move(residual)) {}

PolyForm starlike_solve(const PoincareContext& ctx, const PolyForm& u) {
  if (u.degree() < 1) throw ContractViolation("starlike_solve needs degree >= 1");
  const PolyForm du = exterior_d(u);
  if (!du.empty()) throw NotClosedError(du);
  return poincare_R(ctx, u);
}

}  // namespace derham
