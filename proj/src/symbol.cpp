#include "derham/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "derham/directions.hpp"
#include "derham/errors.hpp"
#include "derham/exterior_algebra.hpp"
#include "derham/kernel.hpp"
#include "derham/parallel.hpp"
#include "derham/quadrature.hpp"

namespace derham {

namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr cplx I(0.0, 1.0);

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Nodes t in [0, 1] with weights, and theta^(t xi), d_j theta^(t xi) there.
struct SymbolNodes {
  std::vector<double> t, w;
  std::vector<cplx> f, fj;
};

SymbolNodes symbol_nodes(const SymbolProbe& p, std::span<const double> xi) {
  const int n = p.dimension();
  const double rho = norm(xi);
  SymbolNodes s;
  if (rho < 1.0) {
    const GaussRule& g = gauss_legendre(16);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      s.t.push_back(0.5 * (1.0 + g.nodes[q]));
      s.w.push_back(0.5 * g.weights[q]);
    }
  } else {
    // tau = t |xi| on unit-length panels up to min(|xi|, tau_max)
    const double L = std::min(rho, p.tau_max);
    const int panels = std::max(1, static_cast<int>(std::ceil(L)));
    const double h = L / panels;
    const GaussRule& g = gauss_legendre(p.panel_points);
    for (int k = 0; k < panels; ++k)
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double tau = h * (k + 0.5 * (1.0 + g.nodes[q]));
        s.t.push_back(tau / rho);
        s.w.push_back(0.5 * h * g.weights[q] / rho);
      }
  }
  std::vector<double> z(n);
  for (double t : s.t) {
    for (int i = 0; i < n; ++i) z[i] = t * xi[i];
    s.f.push_back(p.theta.fourier(z));
    s.fj.push_back(p.theta.fourier_gradient(z, p.j - 1));
  }
  return s;
}

cplx k1hat_from(const SymbolProbe& p, const SymbolNodes& s, std::span<const double> x, std::span<const double> xi) {
  const double phase = dot(xi, x), xj = x[p.j - 1];
  cplx acc = 0.0;
  for (std::size_t q = 0; q < s.t.size(); ++q) {
    const double t = s.t[q];
    acc += s.w[q] * ipow(1.0 + t, p.l - 1) * std::polar(1.0, t * phase) * (I * s.fj[q] - xj * s.f[q]);
  }
  return acc;
}

}  // namespace

SymbolProbe::SymbolProbe(ThetaBump t, int l_, int j_) : theta(std::move(t)), l(l_), j(j_) {
  const int n = theta.dimension();
  if (l < 1 || l > n) throw ContractViolation("SymbolProbe: l must lie in 1..n");
  if (j < 1 || j > n) throw ContractViolation("SymbolProbe: j must lie in 1..n");
  if (theta.kind() != BumpKind::tensor) throw ContractViolation("SymbolProbe: needs a tensor bump (closed-form theta^)");
}

std::complex<double> symbol_k1hat(const SymbolProbe& p, std::span<const double> x, std::span<const double> xi) {
  return k1hat_from(p, symbol_nodes(p, xi), x, xi);
}

std::vector<std::complex<double>> symbol_k1hat_batch(const SymbolProbe& p, const std::vector<std::vector<double>>& xs,
                                                     std::span<const double> xi) {
  const SymbolNodes s = symbol_nodes(p, xi);
  std::vector<cplx> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(k1hat_from(p, s, x, xi));
  return out;
}

std::vector<std::vector<std::complex<double>>> symbol_k1hat_dx_batch(const SymbolProbe& p,
                                                                     const std::vector<std::vector<double>>& xs,
                                                                     std::span<const double> xi) {
  const int n = p.dimension();
  const SymbolNodes s = symbol_nodes(p, xi);
  std::vector<std::vector<cplx>> out;
  for (const auto& x : xs) {
    const double phase = dot(xi, x), xj = x[p.j - 1];
    std::vector<cplx> d(n, 0.0);
    for (std::size_t q = 0; q < s.t.size(); ++q) {
      const double t = s.t[q];
      const cplx e = s.w[q] * ipow(1.0 + t, p.l - 1) * std::polar(1.0, t * phase);
      const cplx g = I * s.fj[q] - xj * s.f[q];
      for (int i = 0; i < n; ++i) {
        cplx v = I * t * xi[i] * g;
        if (i == p.j - 1) v -= s.f[q];
        d[i] += e * v;
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

double symbol_at_zero(const SymbolProbe& p, std::span<const double> x) {
  // i d_j theta^(0) is the first moment, the centre of a tensor bump
  const int j = p.j - 1;
  return (ipow(2.0, p.l) - 1.0) / p.l * (p.theta.center_d()[j] - x[j]);
}

namespace {

double k_piece(const SymbolProbe& p, std::span<const double> x, std::span<const double> z, Interval range) {
  const int n = p.dimension();
  const double zj = z[p.j - 1];
  if (zj == 0.0) return 0.0;
  const Interval iv = intersect(p.theta.line_support(x, z), range);
  if (iv.empty()) return 0.0;
  const GaussRule& g = gauss_legendre((p.theta.line_degree() + n) / 2 + 2);
  const double h = 0.5 * (iv.hi - iv.lo), c = 0.5 * (iv.hi + iv.lo);
  std::vector<double> y(n);
  double s = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const double sv = c + h * g.nodes[q];
    for (int i = 0; i < n; ++i) y[i] = x[i] + sv * z[i];
    s += g.weights[q] * ipow(sv, n - p.l) * ipow(sv + 1.0, p.l - 1) * p.theta.eval(y);
  }
  return zj * h * s;
}

}  // namespace

double kernel_k(const SymbolProbe& p, std::span<const double> x, std::span<const double> z) {
  const int n = p.dimension();
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = x[i] - z[i];
  return z[p.j - 1] * kernel_G(p.theta, p.l, x, y);
}

double smooth_part_k0(const SymbolProbe& p, std::span<const double> x, std::span<const double> z) {
  return k_piece(p, x, z, Interval{0.0, 1.0});
}

double singular_part_k1(const SymbolProbe& p, std::span<const double> x, std::span<const double> z) {
  return k_piece(p, x, z, Interval{1.0, kInf});
}

ScanGrid ScanGrid::standard(int n) {
  ScanGrid g;
  const int per_axis = n == 2 ? 5 : 3;
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = -2.0 + 4.0 * idx[i] / (per_axis - 1);
    g.xs.push_back(x);
    int i = 0;
    while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == n) break;
  }
  return g;
}

std::vector<std::vector<double>> ScanGrid::ray_directions(int n) const {
  if (n != 2) return sphere_directions(n, directions);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < directions; ++k) {
    const double a = 2 * std::numbers::pi * k / directions + angle_offset;
    out.push_back({std::cos(a), std::sin(a)});
  }
  return out;
}

std::vector<double> ScanGrid::radii() const {
  std::vector<double> r;
  const int steps = static_cast<int>(std::lround(std::log10(xi_max / xi_min) * per_decade));
  for (int k = 0; k <= steps; ++k) r.push_back(xi_min * std::pow(10.0, static_cast<double>(k) / per_decade));
  return r;
}

DecayReport decay_scan(const SymbolProbe& p, const ScanGrid& grid) {
  const int n = p.dimension();
  if (grid.xs.empty() || grid.directions < 1 || !(grid.xi_max > grid.xi_min) || grid.per_decade < 1)
    throw ContractViolation("decay_scan: empty or malformed grid");
  const auto dirs = grid.ray_directions(n);
  const auto radii = grid.radii();
  const std::size_t nr = radii.size(), nd = dirs.size(), nx = grid.xs.size();

  // per (ray, radius): E0, E1, Ex sups over x, and E0 per x
  std::vector<double> e0(nd * nr), e1(nd * nr), ex(nd * nr);
  std::vector<std::vector<double>> e0x(nd * nr, std::vector<double>(nx));
  parallel_for(nd * nr, [&](std::size_t item) {
    const auto& w = dirs[item / nr];
    const double rho = radii[item % nr];
    std::vector<double> xi(n);
    for (int i = 0; i < n; ++i) xi[i] = rho * w[i];
    const auto v = symbol_k1hat_batch(p, grid.xs, xi);
    for (std::size_t a = 0; a < nx; ++a) {
      e0x[item][a] = std::abs(v[a]) * (1.0 + rho);
      e0[item] = std::max(e0[item], e0x[item][a]);
    }
    const double h = p.fd_relative * (1.0 + rho);
    for (int i = 0; i < n; ++i) {
      std::vector<double> xp = xi, xm = xi;
      xp[i] += h;
      xm[i] -= h;
      const auto vp = symbol_k1hat_batch(p, grid.xs, xp), vm = symbol_k1hat_batch(p, grid.xs, xm);
      for (std::size_t a = 0; a < nx; ++a)
        e1[item] = std::max(e1[item], std::abs(vp[a] - vm[a]) / (2 * h) * (1.0 + rho) * (1.0 + rho));
    }
    for (const auto& d : symbol_k1hat_dx_batch(p, grid.xs, xi))
      for (const auto& c : d) ex[item] = std::max(ex[item], std::abs(c) * (1.0 + rho));
  });

  DecayReport r;
  r.n = n;
  r.l = p.l;
  r.j = p.j;
  r.xi = radii;
  r.E0.assign(nr, 0.0);
  r.E1.assign(nr, 0.0);
  r.Ex.assign(nr, 0.0);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t k = 0; k < nr; ++k) {
      r.E0[k] = std::max(r.E0[k], e0[d * nr + k]);
      r.E1[k] = std::max(r.E1[k], e1[d * nr + k]);
      r.Ex[k] = std::max(r.Ex[k], ex[d * nr + k]);
    }
  auto running = [](const std::vector<double>& v) {
    std::vector<double> s(v.size());
    double m = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s[k] = m = std::max(m, v[k]);
    return s;
  };
  r.E0_run = running(r.E0);
  r.E1_run = running(r.E1);
  r.Ex_run = running(r.Ex);
  std::size_t from = 0;
  while (from + 1 < nr && radii[from] < grid.plateau_from * (1 - 1e-12)) ++from;
  auto growth = [&](const std::vector<double>& s) { return s[from] > 0.0 ? (s.back() - s[from]) / s[from] : 0.0; };
  r.growth0 = growth(r.E0_run);
  r.growth1 = growth(r.E1_run);
  r.growthx = growth(r.Ex_run);
  r.plateau0 = std::isfinite(r.E0_run.back()) && r.growth0 < grid.plateau_tol;
  r.plateau1 = std::isfinite(r.E1_run.back()) && r.growth1 < grid.plateau_tol;
  r.plateaux = std::isfinite(r.Ex_run.back()) && r.growthx < grid.plateau_tol;

  for (double R : {0.5, 1.0, 2.0}) {
    double c = 0.0;
    for (std::size_t a = 0; a < nx; ++a) {
      double m = 0.0;
      for (double v : grid.xs[a]) m = std::max(m, std::abs(v));
      if (m > R + 1e-12) continue;
      for (std::size_t item = 0; item < nd * nr; ++item) c = std::max(c, e0x[item][a]);
    }
    r.box_radius.push_back(R);
    r.box_constant.push_back(c);
    r.box_ratio.push_back(c / (1.0 + R * std::sqrt(static_cast<double>(n))));
  }

  const std::vector<double> zero(n, 0.0);
  const auto v0 = symbol_k1hat_batch(p, grid.xs, zero);
  for (std::size_t a = 0; a < nx; ++a)
    r.zero_error = std::max(r.zero_error, std::abs(v0[a] - symbol_at_zero(p, grid.xs[a])));
  return r;
}

double apply_K(const SymbolProbe& p, const ThetaBump& u, std::span<const double> x) {
  const int n = p.dimension();
  if (u.dimension() != n) throw ContractViolation("apply_K: u has the wrong dimension");
  // y = x - rho w: k(x, rho w) rho^{n-1} = w_j sum_k C(l-1, k) rho^k A_k(w)
  const GaussRule& g = gauss_legendre((u.line_degree() + p.l) / 2 + 2);
  auto f = [&](std::span<const double> w, std::span<double> out) {
    std::vector<double> back(n), y(n);
    for (int i = 0; i < n; ++i) back[i] = -w[i];
    const Interval iv = intersect(u.line_support(x, back), Interval{0.0, kInf});
    if (iv.empty()) return;
    const double h = 0.5 * (iv.hi - iv.lo), c = 0.5 * (iv.hi + iv.lo);
    std::vector<double> Iu(p.l, 0.0);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double rho = c + h * g.nodes[q];
      for (int i = 0; i < n; ++i) y[i] = x[i] - rho * w[i];
      const double v = h * g.weights[q] * u.eval(y);
      for (int k = 0; k < p.l; ++k) Iu[k] += v * ipow(rho, k);
    }
    double s = 0.0;
    for (int k = 0; k < p.l; ++k) s += binomial(p.l - 1, k) * radial_profile(p.theta, k, x, w) * Iu[k];
    out[0] += w[p.j - 1] * s;
  };
  std::vector<DirectionTarget> targets{{p.theta.support_ball(), +1, 0}, {u.support_ball(), -1, 1}};
  Box box;
  for (double v : x) {
    box.lo.push_back(v - 1.0);
    box.hi.push_back(v + 1.0);
  }
  return integrate_directions(x, box, 1, f, targets)[0];
}

ConsistencyReport operator_consistency(const SymbolProbe& p, const ThetaBump& u,
                                       const std::vector<std::vector<double>>& points, const ConsistencyRule& rule) {
  const int n = p.dimension();
  if (n != 2) throw ContractViolation("operator_consistency: implemented for n = 2");
  if (u.dimension() != n || u.kind() != BumpKind::tensor)
    throw ContractViolation("operator_consistency: u must be a 2D tensor bump");
  ConsistencyReport rep;
  rep.xi_cutoff = rule.xi_cutoff > 0.0 ? rule.xi_cutoff : 200.0 / p.theta.half_width_d();
  const std::size_t np = points.size();
  rep.points.resize(np);
  for (std::size_t a = 0; a < np; ++a) rep.points[a].x = points[a];

  // route 1: the kernel itself
  parallel_for(np, [&](std::size_t a) { rep.points[a].direct = apply_K(p, u, points[a]); });

  // route 2a: int k0(x, x-y) u(y) dy over supp u by tensor Gauss cells
  const Box ub = u.support_box();
  std::vector<std::vector<double>> breaks(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= rule.k0_panels; ++k) breaks[i].push_back(ub.lo[i] + (ub.hi[i] - ub.lo[i]) * k / rule.k0_panels);
  std::vector<double> smooth(np, 0.0);
  parallel_for(np, [&](std::size_t a) {
    const auto& x = points[a];
    double out = 0.0;
    integrate_box_cells(
        [&](std::span<const double> y, std::span<double> o) {
          const double uy = u.eval(y);
          if (uy == 0.0) return;
          std::vector<double> z{x[0] - y[0], x[1] - y[1]};
          o[0] += smooth_part_k0(p, x, z) * uy;
        },
        breaks, rule.k0_points, std::span<double>(&out, 1));
    smooth[a] = out;
  });

  // route 2b: (2 pi)^{-2} int e^{i<xi,x>} k1^(x, xi) u^(xi) dxi in polar xi = rho w.
  // Along a ray k1^ = sum_m C(l-1, m) rho^{-1-m} F_m(rho) with
  // F_m(rho) = int_0^rho tau^m e^{i tau <w,x>} g(tau w) d tau, accumulated panel by panel.
  const double Xi = rep.xi_cutoff;
  const int panels = static_cast<int>(std::ceil(Xi));
  const double hp = Xi / panels;
  const GaussRule& g = gauss_legendre(rule.radial_points);
  const int M = rule.angular, L = p.l;
  std::vector<std::vector<cplx>> per_angle(M, std::vector<cplx>(np));
  parallel_for(M, [&](std::size_t ai) {
    const double phi = 2 * std::numbers::pi * (ai + 0.5) / M;
    const std::vector<double> w{std::cos(phi), std::sin(phi)};
    std::vector<double> z(2);
    auto th = [&](double tau, cplx& f, cplx& fj) {
      z[0] = tau * w[0];
      z[1] = tau * w[1];
      f = p.theta.fourier(z);
      fj = p.theta.fourier_gradient(z, p.j - 1);
    };
    // node values: for each panel, full-panel nodes then each partial segment
    struct Sample {
      double tau, wt;
      cplx f, fj;
    };
    std::vector<std::vector<Sample>> full(panels), partial(panels * g.nodes.size());
    std::vector<double> rho_nodes(panels * g.nodes.size()), rho_w(panels * g.nodes.size());
    std::vector<cplx> uhat(panels * g.nodes.size());
    for (int k = 0; k < panels; ++k) {
      const double s0 = k * hp;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        Sample s;
        s.tau = s0 + 0.5 * hp * (1.0 + g.nodes[q]);
        s.wt = 0.5 * hp * g.weights[q];
        th(s.tau, s.f, s.fj);
        full[k].push_back(s);
        const std::size_t idx = k * g.nodes.size() + q;
        rho_nodes[idx] = s.tau;
        rho_w[idx] = s.wt;
        z[0] = s.tau * w[0];
        z[1] = s.tau * w[1];
        uhat[idx] = u.fourier(z);
        const double len = s.tau - s0;
        for (std::size_t r = 0; r < g.nodes.size(); ++r) {
          Sample t;
          t.tau = s0 + 0.5 * len * (1.0 + g.nodes[r]);
          t.wt = 0.5 * len * g.weights[r];
          th(t.tau, t.f, t.fj);
          partial[idx].push_back(t);
        }
      }
    }
    for (std::size_t a = 0; a < np; ++a) {
      const auto& x = points[a];
      const double px = w[0] * x[0] + w[1] * x[1], xj = x[p.j - 1];
      auto add = [&](const std::vector<Sample>& ss, std::vector<cplx>& F) {
        for (const auto& s : ss) {
          const cplx v = s.wt * std::polar(1.0, s.tau * px) * (I * s.fj - xj * s.f);
          double tm = 1.0;
          for (int m = 0; m < L; ++m, tm *= s.tau) F[m] += tm * v;
        }
      };
      std::vector<cplx> F(L, 0.0), Fq(L);
      cplx acc = 0.0;
      for (int k = 0; k < panels; ++k) {
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
          const std::size_t idx = k * g.nodes.size() + q;
          Fq = F;
          add(partial[idx], Fq);
          const double rho = rho_nodes[idx];
          cplx k1 = 0.0;
          for (int m = 0; m < L; ++m) k1 += static_cast<double>(binomial(L - 1, m)) * std::pow(rho, -1 - m) * Fq[m];
          acc += rho_w[idx] * rho * std::polar(1.0, rho * px) * k1 * uhat[idx];
        }
        add(full[k], F);
      }
      per_angle[ai][a] = acc * (2 * std::numbers::pi / M) / (4 * std::numbers::pi * std::numbers::pi);
    }
  });
  for (std::size_t a = 0; a < np; ++a) {
    cplx total = 0.0;
    for (int ai = 0; ai < M; ++ai) total += per_angle[ai][a];
    auto& pt = rep.points[a];
    pt.split = smooth[a] + total.real();
    pt.split_imag = total.imag();
    pt.relative = std::abs(pt.split - pt.direct) / std::max(std::abs(pt.direct), 1e-300);
    rep.max_relative = std::max(rep.max_relative, pt.relative);
  }
  return rep;
}

}  // namespace derham
