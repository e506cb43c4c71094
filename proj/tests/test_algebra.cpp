#include <doctest.h>

#include <random>

#include "derham/exterior_algebra.hpp"
#include "derham/identities.hpp"
#include "derham/rational.hpp"

using namespace derham;
using Q = ExtElement<Rational>;

namespace {

Q blade(int n, std::initializer_list<int> idx, Rational c = 1) { return Q::from_blade(Blade::from_indices(n, idx), c); }

Q vec3(Rational a1, Rational a2, Rational a3) {
  Q a(3, 1);
  a.add(Blade::from_indices(3, {1}), a1);
  a.add(Blade::from_indices(3, {2}), a2);
  a.add(Blade::from_indices(3, {3}), a3);
  return a;
}

ExtElement<double> random_element(int n, int l, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ExtElement<double> e(n, l);
  for (const auto& b : blades_of_degree(n, l)) e.add(b, g(rng));
  return e;
}

double max_abs(const ExtElement<double>& e) {
  double m = 0;
  for (const auto& [b, c] : e.terms()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_SUITE("algebra") {
  TEST_CASE("contraction examples in R^3") {
    const Q a = vec3(2, 3, 5);
    // a ⌟ (dx1^dx2) = a1 dx2 - a2 dx1
    CHECK(contract(a, blade(3, {1, 2})) == blade(3, {2}, 2) + blade(3, {1}, -3));
    CHECK(contract(a, Q::from_blade(Blade::scalar(3), 7)).terms().empty());
    // a ⌟ vol = a1 dx2^dx3 - a2 dx1^dx3 + a3 dx1^dx2, expanded by hand
    CHECK(contract(a, blade(3, {1, 2, 3})) == blade(3, {2, 3}, 2) + blade(3, {1, 3}, -3) + blade(3, {1, 2}, 5));
  }

  TEST_CASE("hodge star values") {
    CHECK(hodge_star(blade(3, {1})) == blade(3, {2, 3}));
    CHECK(hodge_star(blade(3, {2})) == blade(3, {1, 3}, -1));
    CHECK(hodge_star(blade(2, {1})) == blade(2, {2}));
    CHECK(hodge_star(blade(2, {2})) == blade(2, {1}, -1));
    CHECK(hodge_star(Q::from_blade(Blade::scalar(4), 3)) == Q::from_blade(Blade::volume(4), 3));
    for (int n = 1; n <= 5; ++n)
      for (int l = 0; l <= n; ++l)
        for (const auto& b : blades_of_degree(n, l)) {
          const Q u = Q::from_blade(b, 1);
          CHECK(hodge_star_inverse(hodge_star(u)) == u);
        }
  }

  TEST_CASE("exhaustive identities for n <= 4, randomized up to 6") {
    for (int n = 1; n <= 6; ++n) {
      for (const auto& t : exterior_identities(n, 40, 17 + n)) {
        INFO("n = " << n << ", " << t.name << ": " << t.first_failure);
        CHECK(t.failures == 0);
        CHECK(t.cases > 0);
      }
    }
    const auto r3 = r3_correspondence(300, 5);
    CHECK(r3.failures == 0);
  }

  TEST_CASE("floating-point identities on random elements") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 6; ++n)
      for (int l = 0; l <= n; ++l)
        for (int t = 0; t < 5; ++t) {
          const auto u = random_element(n, l, rng), v = random_element(n, l, rng);
          CHECK(inner(hodge_star(u), hodge_star(v)) == doctest::Approx(inner(u, v)).epsilon(1e-12));
          const double sgn = (l * (n - l)) % 2 ? -1.0 : 1.0;
          CHECK(max_abs(hodge_star(hodge_star(u)) - u.scaled(sgn)) < 1e-12);
          if (l < n) {
            const auto a = random_element(n, 1, rng);
            const auto w = random_element(n, l + 1, rng);
            CHECK(inner(w, wedge(a, u)) == doctest::Approx(inner(u, contract(a, w))).epsilon(1e-12));
          }
        }
  }

  TEST_CASE("dense kernels match the sparse algebra") {
    std::mt19937_64 rng(4);
    for (int n = 2; n <= 4; ++n)
      for (int l = 0; l < n; ++l) {
        const auto a = random_element(n, 1, rng), u = random_element(n, l, rng);
        const auto ad = to_dense(a), ud = to_dense(u);
        std::vector<double> out(static_cast<std::size_t>(binomial(n, l + 1)));
        wedge_one_form_dense(n, l, ad, ud, out);
        CHECK(max_abs(from_dense(n, l + 1, out) - wedge(a, u)) < 1e-14);
        std::vector<double> st(static_cast<std::size_t>(binomial(n, n - l)));
        hodge_star_dense(n, l, ud, st);
        CHECK(max_abs(from_dense(n, n - l, st) - hodge_star(u)) < 1e-14);
        if (l > 0) {
          std::vector<double> c(static_cast<std::size_t>(binomial(n, l - 1)));
          contract_dense(n, l, ad, ud, c);
          CHECK(max_abs(from_dense(n, l - 1, c) - contract(a, u)) < 1e-14);
        }
      }
  }

  TEST_CASE("contracts") {
    CHECK_THROWS_AS(wedge(blade(2, {1}), blade(3, {1})), ContractViolation);
    CHECK_THROWS_AS(contract(blade(3, {1, 2}), blade(3, {1, 2})), ContractViolation);
    CHECK_THROWS_AS(Blade::from_indices(3, {2, 1}), ContractViolation);
    CHECK_THROWS_AS(Blade::from_indices(3, {4}), ContractViolation);
  }
}
