#include <doctest.h>

#include <cmath>
#include <random>

#include "derham/bogovskii.hpp"
#include "derham/errors.hpp"
#include "derham/glue.hpp"
#include "derham/kernel.hpp"
#include "derham/poincare.hpp"
#include "derham/quadrature.hpp"
#include "derham/symbol.hpp"

using namespace derham;

namespace {

Box support_box(const ThetaBump& t) {
  Box b;
  for (double c : t.center_d()) {
    b.lo.push_back(c - t.half_width_d());
    b.hi.push_back(c + t.half_width_d());
  }
  return b;
}

// tensor Gauss nodes over a 2D box, `panels` x `panels` cells of q x q points
template <class F>
void box_rule_2d(const Box& b, int panels, int q, F&& f) {
  const auto& g = gauss_legendre(q);
  const double hx = (b.hi[0] - b.lo[0]) / panels, hy = (b.hi[1] - b.lo[1]) / panels;
  for (int i = 0; i < panels; ++i)
    for (int j = 0; j < panels; ++j)
      for (std::size_t a = 0; a < g.nodes.size(); ++a)
        for (std::size_t c = 0; c < g.nodes.size(); ++c) {
          const std::vector<double> x{b.lo[0] + hx * (i + 0.5 * (g.nodes[a] + 1)), b.lo[1] + hy * (j + 0.5 * (g.nodes[c] + 1))};
          f(x, 0.25 * hx * hy * g.weights[a] * g.weights[c]);
        }
}

// int_I f(t) dt on `panels` panels of a 20-point rule
template <class F>
void line_rule(double lo, double hi, int panels, F&& f) {
  const auto& g = gauss_legendre(20);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t k = 0; k < g.nodes.size(); ++k) f(lo + h * (p + 0.5 * (g.nodes[k] + 1)), 0.5 * h * g.weights[k]);
}

// T_l u(x) = -int theta(a) (x - a) ⌟ int_1^inf t^{l-1} u(a + t(x - a)) dt da, by brute force, for x off supp theta
std::vector<double> literal_T(const ThetaBump& theta, const SampledForm& u, std::span<const double> x) {
  const int n = 2, l = u.degree();
  const Ball ball = u.support().front();
  std::vector<double> out(static_cast<std::size_t>(binomial(n, l - 1)), 0.0);
  box_rule_2d(support_box(theta), 8, 10, [&](const std::vector<double>& a, double wa) {
    const double th = theta.eval(a);
    if (th == 0.0) return;
    const std::vector<double> v{x[0] - a[0], x[1] - a[1]};
    const Interval I = intersect(line_ball(a, v, ball), Interval{1.0, 1e300});
    if (I.empty()) return;
    std::vector<double> inner(u.size(), 0.0), val(u.size());
    line_rule(I.lo, I.hi, 4, [&](double t, double w) {
      const std::vector<double> y{a[0] + t * v[0], a[1] + t * v[1]};
      u.eval(y, val);
      for (std::size_t k = 0; k < val.size(); ++k) inner[k] += w * std::pow(t, l - 1) * val[k];
    });
    contract_dense(n, l, v, inner, out, -th * wa);
  });
  return out;
}

// R_l u(x) = int theta(a) (x - a) ⌟ int_0^1 t^{l-1} u(a + t(x - a)) dt da, by brute force
std::vector<double> literal_R(const ThetaBump& theta, const SampledForm& u, std::span<const double> x) {
  const int n = 2, l = u.degree();
  const Ball ball = u.support().front();
  std::vector<double> out(static_cast<std::size_t>(binomial(n, l - 1)), 0.0);
  box_rule_2d(support_box(theta), 6, 10, [&](const std::vector<double>& a, double wa) {
    const double th = theta.eval(a);
    if (th == 0.0) return;
    const std::vector<double> v{x[0] - a[0], x[1] - a[1]};
    const Interval I = intersect(line_ball(a, v, ball), Interval{0.0, 1.0});
    if (I.empty()) return;
    std::vector<double> inner(u.size(), 0.0), val(u.size());
    line_rule(I.lo, I.hi, 4, [&](double t, double w) {
      const std::vector<double> y{a[0] + t * v[0], a[1] + t * v[1]};
      u.eval(y, val);
      for (std::size_t k = 0; k < val.size(); ++k) inner[k] += w * std::pow(t, l - 1) * val[k];
    });
    contract_dense(n, l, v, inner, out, th * wa);
  });
  return out;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

SampledForm fixture(int n, int l, std::vector<double> c, double r, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return profile_form(radial_bump_field(c, r, k), random_polyform(n, l, 2, rng));
}

ThetaBump theta2(Rational cx, Rational cy, Rational r, int k) {
  return make_tensor_bump(2, std::vector<Rational>{cx, cy}, r, k);
}

}  // namespace

TEST_SUITE("bogovskii") {
  TEST_CASE("T against the literal a-integral off supp theta") {
    const ThetaBump theta = theta2(0, 0, Rational(1, 2), 2);
    const BogovskiiContext ctx(theta);
    const std::vector<std::vector<double>> xs{{0.7, 0.2}, {1.0, 0.5}, {0.6, -0.1}, {0.9, 0.75}};
    for (int l = 1; l <= 2; ++l) {
      const SampledForm u = fixture(2, l, {0.9, 0.3}, 0.5, 3, 40 + l);
      for (const auto& x : xs) {
        const auto got = bogovskii_T(ctx, u, x), want = literal_T(theta, u, x);
        INFO("l = " << l << " x = (" << x[0] << ", " << x[1] << ")");
        CHECK(max_abs(want) > 1e-5);
        CHECK(max_diff(got, want) <= 1e-6 * max_abs(want));
      }
    }
  }

  TEST_CASE("numeric R against exact R where the profile is identically 1") {
    // plateau = 1 on |x| <= 2.5 holds every segment from the sample points to supp theta
    const ThetaBump theta = theta2(Rational(1, 10), 0, Rational(1, 2), 2);
    const BogovskiiContext ctx(theta);
    const PoincareContext pc(theta);
    std::mt19937_64 rng(6);
    const std::vector<double> o{0.0, 0.0};
    for (int l = 1; l <= 2; ++l) {
      const PolyForm P = random_polyform(2, l, 3, rng);
      const SampledForm u = profile_form(plateau_field(o, 2.5, 3.5, 3), P);
      const CompiledPolyForm exact(widen(poincare_R(pc, P), 2));
      for (const auto& x : kronecker_points(Box{{-1, -1}, {1, 1}}, 5)) {
        std::vector<double> want(static_cast<std::size_t>(binomial(2, l - 1)));
        exact.eval(x, want);
        CHECK(max_diff(poincare_R_numeric(ctx, u, x), want) <= 1e-8 * std::max(1.0, max_abs(want)));
      }
    }
  }

  TEST_CASE("endpoint identities") {
    const ThetaBump theta = theta2(Rational(1, 4), Rational(1, 4), Rational(1, 2), 2);
    const BogovskiiContext ctx(theta);
    const auto pts = kronecker_points(Box{{-0.5, -0.5}, {1.2, 1.2}}, 25);
    // l = 0: T_1 du = u
    const SampledForm u0 = fixture(2, 0, {0.5, 0.5}, 0.6, 3, 1);
    CHECK(homotopy_check_T(ctx, u0, pts).max_residual <= 1e-5);
    // l = n with int u = 0: two copies of one bump with opposite signs
    const SampledForm b1 = profile_form(radial_bump_field(std::vector<double>{0.3, 0.5}, 0.4, 3),
                                        monomial_form(2, std::vector<int>{1, 2}, std::vector<int>{0, 0}, 1));
    const SampledForm b2 = profile_form(radial_bump_field(std::vector<double>{0.8, 0.4}, 0.4, 3),
                                        monomial_form(2, std::vector<int>{1, 2}, std::vector<int>{0, 0}, 1));
    const SampledForm phi = sum(b1, b2, 1.0, -1.0);
    CHECK(std::abs(integral_of_form(phi)[0]) < 1e-12);
    double worst = 0.0;
    for (const auto& x : pts) {
      const auto dT = fd_exterior_derivative(2, 1, [&](std::span<const double> y) { return bogovskii_T(ctx, phi, y); }, x,
                                             ctx.fd_step * 2.0, true);
      worst = std::max(worst, std::abs(dT[0] - phi.eval(x)[0]));
    }
    CHECK(worst <= 1e-4);
    // u = *theta: dT_n u = u - (int u) *theta = 0
    const SampledForm st = volume_form(theta);
    CHECK(integral_of_form(st)[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& x : kronecker_points(Box{{-0.2, -0.2}, {0.7, 0.7}}, 6)) {
      const auto dT = fd_exterior_derivative(2, 1, [&](std::span<const double> y) { return bogovskii_T(ctx, st, y); }, x,
                                             ctx.fd_step * 2.0, true);
      CHECK(std::abs(dT[0]) <= 1e-4);
    }
  }

  TEST_CASE("support outside the starlike hull is exactly zero") {
    const ThetaBump theta = theta2(0, 0, Rational(1, 2), 2);
    const BogovskiiContext ctx(theta);
    const SampledForm u = fixture(2, 1, {1.5, 0.0}, 0.4, 3, 2);
    const auto s = support_check_T(ctx, u, kronecker_points(Box{{-1, -1.5}, {2.5, 1.5}}, 120));
    CHECK(s.outside >= 30);
    CHECK(s.max_outside <= 1e-9 * s.u_sup);
  }

  TEST_CASE("duality on two pairs") {
    const ThetaBump theta = theta2(0, 0, Rational(1, 2), 2);
    const BogovskiiContext ctx(theta);
    for (int l = 0; l < 2; ++l) {
      const SampledForm u = fixture(2, l, {0.2, 0.1}, 0.7, 3, 10 + l);
      const SampledForm v = fixture(2, l + 1, {-0.1, 0.3}, 0.8, 3, 20 + l);
      CHECK(adjoint_check(ctx, u, v).relative_defect() <= 1e-5);
    }
  }
}

TEST_SUITE("kernel") {
  TEST_CASE("defining integral against adaptive quadrature") {
    for (int n : {2, 3}) {
      const ThetaBump theta = make_tensor_bump(n, std::vector<Rational>(n, Rational(1, 4)), Rational(1, 2), 2);
      const Box box = support_box(theta);
      std::mt19937_64 rng(n);
      std::uniform_real_distribution<double> U(-1.0, 1.5);
      for (int l = 1; l <= n; ++l)
        for (int t = 0; t < 10; ++t) {
          std::vector<double> x(n), y(n), z(n);
          for (int i = 0; i < n; ++i) {
            x[i] = U(rng);
            y[i] = U(rng);
            z[i] = x[i] - y[i];
          }
          const Interval I = intersect(line_box(y, z, box), Interval{1.0, 1e300});
          double want = 0.0;
          if (!I.empty()) {
            want = integrate_adaptive(
                [&](double s) {
                  std::vector<double> p(n);
                  for (int i = 0; i < n; ++i) p[i] = y[i] + s * z[i];
                  return std::pow(s - 1, n - l) * std::pow(s, l - 1) * theta.eval(p);
                },
                I.lo, I.hi, QuadratureRule{16, 40, 1e-15, 1e-13});
          }
          const double g = kernel_G(theta, l, x, y);
          CHECK(std::abs(g - want) <= 1e-10 * std::max(std::abs(want), 1e-12));
          CHECK(std::abs(kernel_G_homogeneous(theta, l, x, y) - g) <= 1e-9 * std::max(std::abs(g), 1e-12));
        }
    }
  }

  TEST_CASE("agreement, singular diagonal, weak-singularity constant") {
    const ThetaBump theta = theta2(Rational(1, 4), Rational(1, 4), Rational(1, 2), 2);
    const auto a = kernel_agreement(theta, 1, 50, 3);
    CHECK(a.nonzero == 50);
    CHECK(a.max_relative <= 1e-8);
    const std::vector<double> x{0.1, 0.2};
    CHECK_THROWS_AS(kernel_G(theta, 1, x, x), SingularEvaluation);
    const auto w = weak_singularity_scan(theta, 1, kronecker_points(Box{{-1, -1}, {1.5, 1.5}}, 4), 3.0);
    CHECK(std::isfinite(w.sup_constant));
    CHECK(w.max_change <= 0.02);
  }
}

TEST_SUITE("symbol") {
  TEST_CASE("value at xi = 0") {
    for (int n : {2, 3})
      for (int l = 1; l <= n; ++l)
        for (int j = 1; j <= n; ++j) {
          const SymbolProbe p(centered_tensor_bump(n, 1, 4), l, j);
          // int_0^1 (t+1)^{l-1} dt by quadrature
          double I = 0.0;
          line_rule(0.0, 1.0, 1, [&](double t, double w) { I += w * std::pow(t + 1, l - 1); });
          std::vector<double> x(n, 0.0), xi(n, 0.0);
          for (int i = 0; i < n; ++i) x[i] = 0.3 * (i + 1) - 0.5;
          const auto k = symbol_k1hat(p, x, xi);
          CHECK(std::abs(k - std::complex<double>(-x[j - 1] * I, 0.0)) <= 1e-12);
          CHECK(symbol_at_zero(p, x) == doctest::Approx(-x[j - 1] * (std::pow(2.0, l) - 1) / l).epsilon(1e-14));
        }
  }

  TEST_CASE("x = 0, l = 1: i int_0^1 d_j theta^(t xi) dt") {
    const ThetaBump theta = centered_tensor_bump(2, 1, 4);
    const std::vector<double> x{0.0, 0.0};
    for (int j = 1; j <= 2; ++j) {
      const SymbolProbe p(theta, 1, j);
      for (double s : {0.5, 2.0, 7.0, 15.0}) {
        const std::vector<double> xi{s * std::cos(0.3), s * std::sin(0.3)};
        std::complex<double> want = 0.0;
        line_rule(0.0, 1.0, 8, [&](double t, double w) {
          const std::vector<double> q{t * xi[0], t * xi[1]};
          want += w * std::complex<double>(0, 1) * theta.fourier_gradient(q, j - 1);
        });
        const auto got = symbol_k1hat(p, x, xi);
        CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
        CHECK(std::abs(got.real()) <= 1e-12);
      }
    }
  }

  TEST_CASE("k0 + k1 = k") {
    const SymbolProbe p(centered_tensor_bump(2, 1, 4), 2, 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    int nonzero = 0;
    for (int t = 0; t < 40; ++t) {
      const std::vector<double> x{U(rng), U(rng)}, z{U(rng), U(rng)};
      const double k = kernel_k(p, x, z), s = smooth_part_k0(p, x, z) + singular_part_k1(p, x, z);
      if (k != 0.0) ++nonzero;
      CHECK(std::abs(k - s) <= 1e-8 * std::max(std::abs(k), 1e-14));
    }
    CHECK(nonzero > 10);
  }

  TEST_CASE("short decay scan and operator consistency") {
    const SymbolProbe p(centered_tensor_bump(2, 1, 4), 1, 1);
    ScanGrid g = ScanGrid::standard(2);
    g.xi_max = 200;
    g.plateau_from = 20;
    g.directions = 4;
    const auto d = decay_scan(p, g);
    CHECK(d.ok());
    CHECK(d.zero_error <= 1e-10);
    const ThetaBump u = make_tensor_bump(2, std::vector<Rational>{Rational(3, 10), Rational(-1, 5)}, Rational(3, 5), 4);
    const auto c = operator_consistency(p, u, {{0.3, -0.2}, {0.1, 0.2}});
    CHECK(c.max_relative <= 1e-6);
  }
}

TEST_SUITE("glue") {
  TEST_CASE("cover geometry and the partition of unity") {
    for (const auto& c : {l_domain_cover(), u_domain_cover()}) {
      const auto g = check_cover_geometry(c);
      INFO(c.name);
      CHECK(g.ok());
      for (const auto& x : kronecker_points(c.domain.bounding_box(), 50)) {
        double s = 0.0;
        std::vector<double> grad(2, 0.0), gi(2);
        for (const auto& chi : c.chi) {
          s += chi.value(x);
          chi.gradient(x, gi);
          grad[0] += gi[0];
          grad[1] += gi[1];
        }
        CHECK(std::abs(s - 1.0) <= 1e-14);
        CHECK(std::abs(grad[0]) + std::abs(grad[1]) <= 1e-10);
      }
    }
  }

  TEST_CASE("composite R against brute force on the L-domain") {
    const CoverContext c = l_domain_cover();
    const SampledForm u = fixture(2, 1, {0.9, 0.9}, 0.5, 4, 77);  // straddles the inner corner
    for (const auto& x : std::vector<std::vector<double>>{{0.9, 0.9}, {0.5, 1.4}, {1.4, 0.5}}) {
      std::vector<double> want(2, 0.0);
      for (std::size_t i = 0; i < c.pieces.size(); ++i) {
        const double chi = c.chi[i].value(x);
        if (chi == 0.0) continue;
        const auto r = literal_R(c.pieces[i].theta, u, x);
        for (std::size_t k = 0; k < 1; ++k) want[k] += chi * r[k];
      }
      const auto got = composite_R(c, u, x);
      CHECK(std::abs(got[0] - want[0]) <= 1e-5 * std::max(1.0, std::abs(want[0])));
    }
  }

  TEST_CASE("K_0 u = sum (theta_i, u) chi_i") {
    const CoverContext c = l_domain_cover();
    const SampledForm u = fixture(2, 0, {0.9, 0.9}, 0.5, 4, 3);
    std::vector<double> pair(c.pieces.size(), 0.0);
    for (std::size_t i = 0; i < c.pieces.size(); ++i) {
      const auto& th = c.pieces[i].theta;
      box_rule_2d(support_box(th), 4, 12, [&](const std::vector<double>& a, double w) { pair[i] += w * th.eval(a) * u.eval(a)[0]; });
    }
    for (const auto& x : interior_points(c, 6)) {
      double want = 0.0;
      for (std::size_t i = 0; i < c.pieces.size(); ++i) want += pair[i] * c.chi[i].value(x);
      CHECK(remainder_K(c, u, x)[0] == doctest::Approx(want).epsilon(1e-8));
    }
  }

  TEST_CASE("glued homotopies, commutation and degeneration") {
    const CoverContext c = l_domain_cover();
    const auto pts = interior_points(c, 6);
    const SampledForm u = fixture(2, 1, {0.55, 0.95}, 0.44, 4, 5);
    CHECK(glue_homotopy_R(c, u, pts).max_residual <= 1e-4);
    CHECK(glue_homotopy_T(c, u, pts).max_residual <= 1e-4);
    const auto cm = commutation_check(c, u, pts);
    CHECK(cm.K.max_residual <= 1e-3);
    CHECK(cm.L.max_residual <= 1e-3);
    const CoverContext flat = flat_cover(Box{{-1, -1}, {2, 2}}, Ball{{0.5, 0.5}, 0.4});
    const SampledForm v = fixture(2, 1, {0.6, 0.4}, 0.6, 4, 6);
    CHECK(degeneration_check(flat, v, kronecker_points(Box{{-0.5, -0.5}, {1.5, 1.5}}, 6)).max() <= 1e-10);
    const SampledForm far = fixture(2, 1, {1.6, 1.6}, 0.5, 4, 7);
    CHECK(composite_R_locality(c, far, interior_points(c, 10)).max_value <= 1e-9);
  }

  TEST_CASE("cover JSON") {
    const CoverContext c = l_domain_cover();
    const CoverContext d = cover_from_json(to_json(c));
    REQUIRE(d.pieces.size() == c.pieces.size());
    for (const auto& x : kronecker_points(c.domain.bounding_box(), 20))
      for (std::size_t i = 0; i < c.chi.size(); ++i) CHECK(d.chi[i].value(x) == doctest::Approx(c.chi[i].value(x)));
    CHECK_THROWS_AS(cover_from_json(nlohmann::json{{"name", "bad"}}), ConfigError);
    CHECK_THROWS_AS(cover_by_name("/nonexistent/cover.json"), ConfigError);
  }
}
