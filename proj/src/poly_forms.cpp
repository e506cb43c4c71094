#include "derham/poly_forms.hpp"

#include <algorithm>
#include <sstream>

#include "derham/errors.hpp"

namespace derham {

PolyForm zero_form(int n, int l) { return PolyForm(n, l); }

PolyForm monomial_form(int n, std::span<const int> blade_indices, std::span<const int> alpha, const Rational& c,
                       int nvars) {
  if (nvars < 0) nvars = n;
  if (nvars < n) throw ContractViolation("coefficient ring smaller than the dimension");
  const Blade b = Blade::from_indices(n, blade_indices);
  return PolyForm::from_blade(b, RationalPoly::monomial(nvars, alpha, c));
}

PolyForm scalar_form(int n, const RationalPoly& p) { return PolyForm::from_blade(Blade::scalar(n), p); }

int total_degree(const PolyForm& u) {
  int d = -1;
  for (const auto& [b, c] : u.terms()) d = std::max(d, c.total_degree());
  return d;
}

int coefficient_vars(const PolyForm& u) {
  int v = u.dimension();
  for (const auto& [b, c] : u.terms()) v = std::max(v, c.nvars());
  return v;
}

PolyForm widen(const PolyForm& u, int nvars) {
  return u.transform([&](const RationalPoly& c) { return c.widened(nvars); });
}

PolyForm narrow(const PolyForm& u, int nvars) {
  return u.transform([&](const RationalPoly& c) { return c.narrowed(nvars); });
}

PolyForm exterior_d(const PolyForm& u) {
  const int n = u.dimension();
  PolyForm r(n, u.degree() + 1);
  if (u.degree() >= n) return r;
  for (const auto& [b, c] : u.terms()) {
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if (b.mask() & bit) continue;
      RationalPoly di = c.derivative(i);
      if (di.is_zero()) continue;
      const Blade target = Blade::from_mask(n, b.mask() | bit);
      if (wedge_sign(bit, b.mask()) > 0)
        r.add(target, di);
      else
        r.add(target, -di);
    }
  }
  return r;
}

PolyForm position_minus(int n, std::span<const RationalPoly> a, int nvars) {
  PolyForm x(n, 1);
  for (int i = 0; i < n; ++i) {
    RationalPoly c = RationalPoly::variable(nvars, i);
    if (!a.empty()) c -= a[i];
    x.add(Blade::from_mask(n, 1u << i), c);
  }
  return x;
}

PolyForm koszul(const PolyForm& u) {
  const int n = u.dimension();
  if (u.degree() == 0) return PolyForm(n, -1);
  return contract(position_minus(n, {}, coefficient_vars(u)), u);
}

PolyForm coderivative(const PolyForm& u) {
  PolyForm s = exterior_d(hodge_star(u));
  if (u.degree() % 2) s = -s;
  return hodge_star_inverse(s);
}

PolyForm multiply(const RationalPoly& f, const PolyForm& u) {
  return u.transform([&](const RationalPoly& c) { return f * c; });
}

PolyForm pullback_dilation(const PolyForm& u, std::span<const Rational> a, const Rational& t) {
  const int n = u.dimension();
  if (static_cast<int>(a.size()) != n) throw ContractViolation("pullback_dilation: base point has wrong dimension");
  const int nv = coefficient_vars(u);
  std::vector<RationalPoly> images;
  for (int i = 0; i < nv; ++i) {
    RationalPoly img = RationalPoly::variable(nv, i);
    if (i < n) img = t * img + RationalPoly::constant(nv, (1 - t) * a[i]);
    images.push_back(std::move(img));
  }
  const Rational scale = pow(t, static_cast<unsigned>(u.degree()));
  return u.transform([&](const RationalPoly& c) { return c.substitute(images, 1 << 20) * scale; });
}

PolyForm pullback_dilation(const PolyForm& u, std::span<const RationalPoly> a, const RationalPoly& t,
                           int degree_cap) {
  const int n = u.dimension();
  if (static_cast<int>(a.size()) != n) throw ContractViolation("pullback_dilation: base point has wrong dimension");
  const int out = t.nvars();
  std::vector<RationalPoly> images;
  for (int i = 0; i < n; ++i) images.push_back(a[i] + t * (RationalPoly::variable(out, i) - a[i]));
  const RationalPoly scale = pow(t, u.degree(), degree_cap);
  return u.transform([&](const RationalPoly& c) {
    return c.narrowed(n).substitute(images, degree_cap) * scale;
  });
}

PolyForm pullback_scale_shift(const PolyForm& u, std::span<const Rational> s, std::span<const Rational> b) {
  const int n = u.dimension();
  if (static_cast<int>(s.size()) != n || static_cast<int>(b.size()) != n)
    throw ContractViolation("pullback_scale_shift: wrong parameter dimension");
  const int nv = coefficient_vars(u);
  std::vector<RationalPoly> images;
  for (int i = 0; i < nv; ++i) {
    RationalPoly img = RationalPoly::variable(nv, i);
    if (i < n) img = s[i] * img + RationalPoly::constant(nv, b[i]);
    images.push_back(std::move(img));
  }
  PolyForm r(n, u.degree());
  for (const auto& [bl, c] : u.terms()) {
    Rational jac = 1;
    for (int j : bl.indices()) jac *= s[j - 1];
    r.add(bl, c.substitute(images, 1 << 20) * jac);
  }
  return r;
}

std::string QSpaceSpec::describe() const {
  std::ostringstream os;
  os << "P(Lambda^" << degree << ") in R^" << n << ":";
  for (const auto& [b, bd] : bounds) {
    os << " [" << b.to_string() << ": Q^{";
    for (std::size_t i = 0; i < bd.size(); ++i) os << (i ? "," : "") << bd[i];
    os << "}]";
  }
  return os.str();
}

QSpaceSpec q_complex_space(int n, int l, int p) {
  if (p < 0) throw ContractViolation("q_complex_space: negative degree");
  QSpaceSpec s{n, l, {}};
  for (const Blade& b : blades_of_degree(n, l)) {
    std::vector<int> bd(n);
    for (int i = 0; i < n; ++i) bd[i] = b.contains(i + 1) ? p - 1 : p;
    s.bounds.emplace(b, std::move(bd));
  }
  return s;
}

std::vector<QSpaceSpec> q_complex(int n, int p) {
  std::vector<QSpaceSpec> out;
  for (int l = 0; l <= n; ++l) out.push_back(q_complex_space(n, l, p));
  return out;
}

bool qspace_membership(const PolyForm& u, const QSpaceSpec& spec) {
  if (u.dimension() != spec.n) throw ContractViolation("qspace_membership: dimension mismatch");
  if (u.empty()) return true;
  if (u.degree() != spec.degree) return false;
  for (const auto& [b, c] : u.terms()) {
    auto it = spec.bounds.find(b);
    if (it == spec.bounds.end()) return false;
    for (const auto& [m, coef] : c.terms()) {
      for (int i = 0; i < c.nvars(); ++i) {
        const int bound = i < spec.n ? it->second[i] : 0;
        if (m.e[i] > bound) return false;
      }
      if (std::any_of(it->second.begin(), it->second.end(), [](int v) { return v < 0; })) return false;
    }
  }
  return true;
}

std::vector<PolyForm> qspace_basis(const QSpaceSpec& spec) {
  std::vector<PolyForm> out;
  const int n = spec.n;
  for (const auto& [b, bd] : spec.bounds) {
    if (std::any_of(bd.begin(), bd.end(), [](int v) { return v < 0; })) continue;
    std::vector<int> alpha(n, 0);
    while (true) {
      std::vector<int> idx = b.indices();
      out.push_back(monomial_form(n, idx, alpha, 1));
      int i = 0;
      while (i < n && alpha[i] == bd[i]) alpha[i++] = 0;
      if (i == n) break;
      ++alpha[i];
    }
  }
  return out;
}

PolyForm random_polyform(int n, int l, int max_degree, std::mt19937_64& rng, int max_terms) {
  PolyForm u(n, l);
  std::uniform_int_distribution<int> nterms(1, std::max(1, max_terms));
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> var(0, n - 1);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  for (const Blade& b : blades_of_degree(n, l)) {
    const int k = nterms(rng);
    for (int t = 0; t < k; ++t) {
      std::vector<int> alpha(n, 0);
      const int d = deg(rng);
      for (int s = 0; s < d; ++s) ++alpha[var(rng)];
      int p = num(rng);
      if (p == 0) p = 1;
      Rational q(p, den(rng));
      q.canonicalize();
      u.add(b, RationalPoly::monomial(n, alpha, q));
    }
  }
  return u;
}

std::string to_string(const PolyForm& u) {
  if (u.empty()) return "0";
  std::string s;
  for (const auto& [b, c] : u.terms()) {
    if (!s.empty()) s += " + ";
    s += "(" + c.to_string() + ")";
    if (b.degree() > 0) s += " " + b.to_string();
  }
  return s;
}

namespace {

nlohmann::json integer_json(const Integer& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

Integer integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) return Integer(j.get<std::string>(), 10);
  throw ConfigError("expected an integer (number or decimal string)");
}

}  // namespace

nlohmann::json to_json(const PolyForm& u) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [b, c] : u.terms()) {
    nlohmann::json monos = nlohmann::json::array();
    for (auto it = c.terms().begin(); it != c.terms().end(); ++it) {
      std::vector<int> alpha(c.nvars());
      for (int i = 0; i < c.nvars(); ++i) alpha[i] = it->first.e[i];
      monos.push_back({{"alpha", alpha},
                       {"num", integer_json(it->second.get_num())},
                       {"den", integer_json(it->second.get_den())}});
    }
    terms.push_back({{"blade", b.indices()}, {"monomials", monos}});
  }
  return {{"n", u.dimension()}, {"l", u.degree()}, {"terms", terms}};
}

PolyForm polyform_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int l = j.at("l").get<int>();
    if (n < 1 || n > max_dimension()) throw ConfigError("PolyForm: n out of range");
    if (l < 0 || l > n) throw ConfigError("PolyForm: l out of range");
    PolyForm u(n, l);
    for (const auto& t : j.at("terms")) {
      const auto idx = t.at("blade").get<std::vector<int>>();
      if (static_cast<int>(idx.size()) != l) throw ConfigError("PolyForm: blade length differs from l");
      const Blade b = Blade::from_indices(n, std::span<const int>(idx));
      for (const auto& m : t.at("monomials")) {
        auto alpha = m.at("alpha").get<std::vector<int>>();
        if (static_cast<int>(alpha.size()) > n) throw ConfigError("PolyForm: alpha longer than n");
        Integer den = m.contains("den") ? integer_from_json(m.at("den")) : Integer(1);
        if (den == 0) throw ConfigError("PolyForm: zero denominator");
        Rational q(integer_from_json(m.at("num")), den);
        q.canonicalize();
        u.add(b, RationalPoly::monomial(n, alpha, q));
      }
    }
    return u;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("PolyForm JSON: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("PolyForm JSON: ") + e.what());
  }
}

}  // namespace derham
