#include "derham/identities.hpp"

#include <random>

#include "derham/exterior_algebra.hpp"

namespace derham {

namespace {

using E = ExtElement<int>;

E basis_vector(int n, int i) { return E::from_blade(Blade::from_mask(n, 1u << i), 1); }

E random_element(int n, int l, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(-3, 3);
  E e(n, l);
  for (const auto& b : blades_of_degree(n, l)) e.add(b, c(rng));
  return e;
}

E random_vector(int n, std::mt19937_64& rng) { return random_element(n, 1, rng); }

int scalar_of(const E& e) { return e.coefficient(Blade::scalar(e.dimension())); }

struct Recorder {
  IdentityTally t;
  explicit Recorder(std::string name) { t.name = std::move(name); }
  void check(bool ok, const std::string& what) {
    ++t.cases;
    if (!ok && t.failures++ == 0) t.first_failure = what;
  }
};

std::string str(const E& e) {
  std::string s;
  for (const auto& [b, c] : e.terms()) s += (s.empty() ? "" : " + ") + std::to_string(c) + " " + b.to_string();
  return s.empty() ? "0" : s;
}

}  // namespace

std::vector<IdentityTally> exterior_identities(int n, int random_trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Recorder starstar("**u = (-1)^{l(n-l)} u"), starwedge("*(a^u) = (-1)^l a⌟*u"),
      starprod("<u,v> = *(u^*v) = <*u,*v>"), prodcontr("<w,a^u> = <u,a⌟w>"),
      antider("a⌟(u^v) = (a⌟u)^v + (-1)^l u^(a⌟v)"), norm("b^*b = vol"), anti("u^v = (-1)^{lm} v^u");

  auto starstar_case = [&](const E& u) {
    const int l = u.degree();
    const E lhs = hodge_star(hodge_star(u));
    starstar.check(lhs == ((l * (n - l)) % 2 == 0 ? u : -u), "u = " + str(u));
  };
  auto starwedge_case = [&](const E& a, const E& u) {
    const int l = u.degree();
    if (l + 1 > n) return;
    const E lhs = hodge_star(wedge(a, u));
    const E rhs = contract(a, hodge_star(u));
    starwedge.check(lhs == (l % 2 == 0 ? rhs : -rhs), "a = " + str(a) + ", u = " + str(u));
  };
  auto starprod_case = [&](const E& u, const E& v) {
    const int iv = inner(u, v);
    const int sv = scalar_of(hodge_star(wedge(u, hodge_star(v))));
    const int ss = inner(hodge_star(u), hodge_star(v));
    starprod.check(iv == sv && iv == ss, "u = " + str(u) + ", v = " + str(v));
  };
  auto prodcontr_case = [&](const E& w, const E& a, const E& u) {
    prodcontr.check(inner(w, wedge(a, u)) == inner(u, contract(a, w)),
                    "w = " + str(w) + ", a = " + str(a) + ", u = " + str(u));
  };
  auto antider_case = [&](const E& a, const E& u, const E& v) {
    const int l = u.degree();
    if (l + v.degree() > n || l + v.degree() == 0) return;
    E rhs = wedge(contract(a, u), v);
    const E second = wedge(u, contract(a, v));
    rhs += l % 2 == 0 ? second : -second;
    antider.check(contract(a, wedge(u, v)) == rhs, "a = " + str(a) + ", u = " + str(u) + ", v = " + str(v));
  };
  auto anti_case = [&](const E& u, const E& v) {
    const E uv = wedge(u, v), vu = wedge(v, u);
    anti.check(uv == ((u.degree() * v.degree()) % 2 == 0 ? vu : -vu), "u = " + str(u) + ", v = " + str(v));
  };

  // exhaustive over blades and coordinate vectors
  for (int l = 0; l <= n; ++l) {
    const auto bl = blades_of_degree(n, l);
    for (const auto& b : bl) {
      const E u = E::from_blade(b, 1);
      starstar_case(u);
      norm.check(wedge(u, hodge_star(u)) == E::from_blade(Blade::volume(n), 1), "b = " + b.to_string());
      for (int i = 0; i < n; ++i) starwedge_case(basis_vector(n, i), u);
      for (const auto& c : bl) starprod_case(u, E::from_blade(c, 1));
      if (l < n)
        for (const auto& c : blades_of_degree(n, l + 1))
          for (int i = 0; i < n; ++i) prodcontr_case(E::from_blade(c, 1), basis_vector(n, i), u);
      for (int m = 0; m <= n - l; ++m)
        for (const auto& c : blades_of_degree(n, m)) {
          const E v = E::from_blade(c, 1);
          anti_case(u, v);
          for (int i = 0; i < n; ++i) antider_case(basis_vector(n, i), u, v);
        }
    }
  }
  // random integer combinations
  std::uniform_int_distribution<int> deg(0, n);
  for (int t = 0; t < random_trials; ++t) {
    const int l = deg(rng), m = std::uniform_int_distribution<int>(0, n - l)(rng);
    const E a = random_vector(n, rng), u = random_element(n, l, rng), v = random_element(n, l, rng);
    const E w = random_element(n, m, rng);
    starstar_case(u);
    starwedge_case(a, u);
    starprod_case(u, v);
    if (l < n) prodcontr_case(random_element(n, l + 1, rng), a, u);
    antider_case(a, u, w);
    anti_case(u, w);
  }
  return {starstar.t, starwedge.t, starprod.t, prodcontr.t, antider.t, norm.t, anti.t};
}

IdentityTally r3_correspondence(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> c(-5, 5);
  Recorder r("R^3: a^u = a x u, a⌟u = a.u, a⌟(*u) = -a x u");
  auto vec = [&](const std::array<int, 3>& v) {
    E e(3, 1);
    for (int i = 0; i < 3; ++i) e.add(Blade::from_mask(3, 1u << i), v[i]);
    return e;
  };
  // a 2-form read as the vector *w
  auto as_vector = [&](const E& w) {
    const E s = hodge_star(w);
    std::array<int, 3> v{};
    for (int i = 0; i < 3; ++i) v[i] = s.coefficient(Blade::from_mask(3, 1u << i));
    return v;
  };
  for (int t = 0; t < trials; ++t) {
    const std::array<int, 3> a{c(rng), c(rng), c(rng)}, u{c(rng), c(rng), c(rng)};
    const std::array<int, 3> cross{a[1] * u[2] - a[2] * u[1], a[2] * u[0] - a[0] * u[2], a[0] * u[1] - a[1] * u[0]};
    const int dot = a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
    const E A = vec(a), U = vec(u);
    const bool wedge_ok = as_vector(wedge(A, U)) == cross;
    const bool dot_ok = scalar_of(contract(A, U)) == dot;
    // u as a 2-form is *u; a⌟(*u) read back as a vector
    const E c2 = contract(A, hodge_star(U));
    std::array<int, 3> back{};
    for (int i = 0; i < 3; ++i) back[i] = c2.coefficient(Blade::from_mask(3, 1u << i));
    const std::array<int, 3> minus_cross{-cross[0], -cross[1], -cross[2]};
    r.check(wedge_ok && dot_ok && back == minus_cross, "a, u trial " + std::to_string(t));
  }
  return r.t;
}

}  // namespace derham
