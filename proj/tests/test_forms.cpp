#include <doctest.h>

#include <complex>
#include <random>

#include "derham/poincare.hpp"
#include "derham/poly_forms.hpp"
#include "derham/quadrature.hpp"
#include "derham/smoothing_kernel.hpp"

using namespace derham;

namespace {

RationalPoly mono(int nv, std::vector<int> alpha, Rational c = 1) { return RationalPoly::monomial(nv, alpha, c); }

PolyForm form(int n, std::vector<int> blade, std::vector<int> alpha, Rational c = 1) {
  return monomial_form(n, blade, alpha, c);
}

bool is_zero_form(const PolyForm& u) { return u.terms().empty(); }

// homogeneous random form: every coefficient of total degree r
PolyForm homogeneous(int n, int l, int r, std::mt19937_64& rng) {
  PolyForm u = zero_form(n, l);
  std::uniform_int_distribution<int> var(0, n - 1), c(-4, 4);
  for (const auto& b : blades_of_degree(n, l)) {
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < r; ++k) ++alpha[static_cast<std::size_t>(var(rng))];
    u.add(b, RationalPoly::monomial(n, alpha, Rational(c(rng))));
  }
  return u;
}

}  // namespace

TEST_SUITE("forms") {
  TEST_CASE("d is a differential and satisfies the product rule") {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 4; ++n)
      for (int l = 0; l <= n; ++l)
        for (int t = 0; t < 4; ++t) {
          const PolyForm u = random_polyform(n, l, 3, rng);
          CHECK(is_zero_form(exterior_d(exterior_d(u))));
          for (int m = 0; m + l <= n; ++m) {
            const PolyForm v = random_polyform(n, m, 2, rng);
            PolyForm rhs = wedge(exterior_d(u), v);
            const PolyForm second = wedge(u, exterior_d(v));
            rhs += l % 2 ? -second : second;
            if (l + m < n) CHECK(exterior_d(wedge(u, v)) == rhs);
          }
        }
  }

  TEST_CASE("homogeneous Cartan identity for the Koszul operator") {
    std::mt19937_64 rng(8);
    for (int n = 1; n <= 4; ++n)
      for (int l = 0; l <= n; ++l)
        for (int r = 0; r <= 3; ++r) {
          const PolyForm u = homogeneous(n, l, r, rng);
          const PolyForm lhs = exterior_d(koszul(u)) + koszul(exterior_d(u));
          CHECK(lhs == multiply(RationalPoly::constant(n, Rational(l + r)), u));
          CHECK(is_zero_form(koszul(koszul(u))));
        }
  }

  TEST_CASE("coderivative") {
    // *u = x1 dx2, d*u = dx1^dx2, delta u = *^{-1}(-d*u) = -1 with *delta = (-1)^l d*
    const PolyForm u = form(2, {1}, {1, 0});
    CHECK(coderivative(u) == scalar_form(2, RationalPoly::constant(2, -1)));
    std::mt19937_64 rng(5);
    for (int n = 2; n <= 4; ++n)
      for (int l = 0; l <= n; ++l)
        for (int t = 0; t < 4; ++t) {
          const PolyForm v = random_polyform(n, l, 3, rng);
          // *d v = (-1)^{l+1} delta * v, from delta = (-1)^k *^{-1} d * on k-forms
          if (l < n) {
            const PolyForm lhs = hodge_star(exterior_d(v));
            const PolyForm rhs = coderivative(hodge_star(v));
            CHECK(lhs == (l % 2 ? rhs : -rhs));
          }
          CHECK(is_zero_form(coderivative(coderivative(v))));
        }
  }

  TEST_CASE("Cartan formula along the dilation, t d/dt F_t^* u = F_t^*(d(X⌟u) + X⌟du)") {
    std::mt19937_64 rng(21);
    for (int n = 2; n <= 3; ++n)
      for (int l = 0; l <= n; ++l) {
        const PolyForm u = random_polyform(n, l, 2, rng);
        const std::vector<Rational> a0{Rational(1, 3), Rational(-2, 5), Rational(3, 7)};
        std::vector<RationalPoly> a_out, a_in;
        for (int i = 0; i < n; ++i) {
          a_out.push_back(RationalPoly::constant(n + 1, a0[static_cast<std::size_t>(i)]));
          a_in.push_back(RationalPoly::constant(n, a0[static_cast<std::size_t>(i)]));
        }
        const RationalPoly t = RationalPoly::variable(n + 1, n);
        const PolyForm X = position_minus(n, a_in, n);
        const PolyForm lie = exterior_d(contract(X, u)) + contract(X, exterior_d(u));
        const PolyForm pulled = pullback_dilation(u, a_out, t);
        const PolyForm lhs = multiply(t, pulled.transform([&](const RationalPoly& p) { return p.derivative(n); }));
        CHECK(lhs == pullback_dilation(lie, a_out, t));
      }
  }

  TEST_CASE("Q-space membership") {
    for (int p = 1; p <= 3; ++p) {
      const auto s = q_complex_space(3, 1, p);
      CHECK(qspace_membership(form(3, {2}, {p, 0, 0}), s));   // dx2 component in Q^{p,p-1,p}
      CHECK_FALSE(qspace_membership(form(3, {2}, {0, p, 0}), s));
      CHECK_FALSE(qspace_membership(form(3, {1}, {p, 0, 0}), s));
    }
  }

  TEST_CASE("JSON round trip") {
    std::mt19937_64 rng(2);
    for (int n = 1; n <= 4; ++n)
      for (int l = 0; l <= n; ++l) {
        const PolyForm u = random_polyform(n, l, 4, rng);
        CHECK(polyform_from_json(to_json(u)) == u);
      }
  }
}

TEST_SUITE("theta") {
  TEST_CASE("normalization and moments") {
    const ThetaBump t1 = centered_tensor_bump(1, 1, 1);
    CHECK(t1.eval(std::vector<double>{0.0}) == doctest::Approx(0.75));  // 1 / int (1 - t^2)
    const ThetaBump t = centered_tensor_bump(2, 1, 1);
    CHECK(theta_pair(t, scalar_form(2, RationalPoly::constant(2, 1))) == 1);
    // (int t^2 (1 - t^2)) / (int (1 - t^2)) = (4/15) / (4/3)
    CHECK(theta_pair(t, scalar_form(2, mono(2, {2, 0}))) == Rational(1, 5));
    const std::vector<Rational> c{Rational(1, 3), Rational(-1, 2)};
    const ThetaBump s = make_tensor_bump(2, c, Rational(1, 4), 3);
    CHECK(theta_pair(s, scalar_form(2, mono(2, {1, 0}))) == c[0]);
    CHECK(theta_pair(s, scalar_form(2, mono(2, {0, 1}))) == c[1]);
    CHECK(s.eval(std::vector<double>{0.6, 0.0}) == 0.0);
  }

  TEST_CASE("Fourier transform against tensor Gauss quadrature") {
    for (int k : {1, 3}) {
      const std::vector<Rational> c{Rational(1, 5), Rational(-1, 3)};
      const ThetaBump t = make_tensor_bump(2, c, Rational(1, 2), k);
      CHECK(std::abs(t.fourier(std::vector<double>{0.0, 0.0}) - 1.0) < 1e-14);
      const auto g = gauss_legendre(60);
      std::mt19937_64 rng(k);
      std::uniform_real_distribution<double> U(-8.0, 8.0);
      for (int q = 0; q < 20; ++q) {
        const std::vector<double> xi{U(rng), U(rng)};
        std::complex<double> s = 0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
          for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            const std::vector<double> x{0.2 + 0.5 * g.nodes[i], -1.0 / 3 + 0.5 * g.nodes[j]};
            s += 0.25 * g.weights[i] * g.weights[j] * t.eval(x) *
                 std::exp(std::complex<double>(0, -(xi[0] * x[0] + xi[1] * x[1])));
          }
        CHECK(std::abs(t.fourier(xi) - s) < 1e-10);
      }
    }
  }
}

TEST_SUITE("poincare") {
  TEST_CASE("closed forms for the centered k = 1 bump") {
    const PoincareContext pc(centered_tensor_bump(2, 1, 1));
    // R_1(x1 dx1) = int theta(a) (x1 - a1)(a1 + x1)/2 da = x1^2/2 - E[a1^2]/2, E[a1^2] = 1/5
    const PolyForm u = form(2, {1}, {1, 0});
    const PolyForm v = widen(poincare_R(pc, u), 2);
    CHECK(v == scalar_form(2, mono(2, {2, 0}, Rational(1, 2)) + RationalPoly::constant(2, Rational(-1, 10))));
    CHECK(exterior_d(v) == u);
    const PolyForm w = form(2, {1, 2}, {0, 0});
    const PolyForm Rw = widen(poincare_R(pc, w), 2);
    CHECK(Rw == form(2, {2}, {1, 0}, Rational(1, 2)) + form(2, {1}, {0, 1}, Rational(-1, 2)));
    CHECK(exterior_d(Rw) == w);
    CHECK(starlike_solve(pc, u) == v);
    CHECK(exterior_d(starlike_solve(pc, w)) == w);
    CHECK_THROWS_AS(starlike_solve(pc, form(2, {1}, {0, 1})), NotClosedError);
  }

  TEST_CASE("base-point operator") {
    const std::vector<Rational> zero(3, Rational(0));
    // a = 0, u = dx2^dx3: (x2 dx3 - x3 dx2) int_0^1 t dt
    const PolyForm r = poincare_unregularized(zero, form(3, {2, 3}, {0, 0, 0}));
    CHECK(widen(r, 3) == form(3, {3}, {0, 1, 0}, Rational(1, 2)) + form(3, {2}, {0, 0, 1}, Rational(-1, 2)));
    // gradient case: R_a du0 = u0(x) - u0(a)
    std::mt19937_64 rng(4);
    const std::vector<Rational> a{Rational(1, 2), Rational(-1, 3), Rational(2)};
    for (int t = 0; t < 5; ++t) {
      const PolyForm u0 = random_polyform(3, 0, 3, rng);
      const PolyForm g = widen(poincare_unregularized(a, exterior_d(u0)), 3);
      const RationalPoly p = u0.coefficient(Blade::scalar(3));
      Rational pa = 0;
      for (const auto& [m, c] : p.terms()) {
        Rational term = c;
        for (int i = 0; i < 3; ++i) term *= pow(a[static_cast<std::size_t>(i)], static_cast<unsigned>(m.e[static_cast<std::size_t>(i)]));
        pa += term;
      }
      CHECK(g == u0 - scalar_form(3, RationalPoly::constant(3, pa)));
    }
  }

  TEST_CASE("homotopy identity, endpoint cases and the averaged route") {
    const std::vector<Rational> c{Rational(1, 4), Rational(-1, 8), Rational(1, 3)};
    std::mt19937_64 rng(9);
    for (int n = 2; n <= 3; ++n) {
      const PoincareContext pc(make_tensor_bump(n, std::span(c).first(static_cast<std::size_t>(n)), Rational(1, 2), 2));
      for (int l = 0; l <= n; ++l)
        for (int t = 0; t < 6; ++t) {
          const PolyForm u = random_polyform(n, l, 3, rng);
          CHECK(is_zero_form(homotopy_defect_R(pc, u)));
          if (l >= 1 && t < 2) CHECK(widen(poincare_R(pc, u), n) == widen(poincare_R_averaged(pc, u), n));
        }
      // l = 0: R_1(dx1 coefficient) = x1 - (theta, x1)
      const PolyForm x1 = scalar_form(n, RationalPoly::variable(n, 0));
      const PolyForm r = widen(poincare_R(pc, exterior_d(x1)), n);
      CHECK(r == x1 - scalar_form(n, RationalPoly::constant(n, c[0])));
    }
  }

  TEST_CASE("Q-space preservation in 2D") {
    const PoincareContext pc(centered_tensor_bump(2, 1, 1));
    for (int p = 1; p <= 2; ++p)
      for (int l = 1; l <= 2; ++l) CHECK(check_qspace_preservation(pc, q_complex(2, p), l).ok());
  }
}
