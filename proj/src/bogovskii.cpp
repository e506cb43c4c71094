#include "derham/bogovskii.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "derham/errors.hpp"
#include "derham/parallel.hpp"
#include "derham/quadrature.hpp"

namespace derham {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

Box cube_around(std::span<const double> x, double half) {
  Box b;
  for (double v : x) {
    b.lo.push_back(v - half);
    b.hi.push_back(v + half);
  }
  return b;
}

void check_form(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x, const char* what) {
  if (u.dimension() != ctx.dimension() || static_cast<int>(x.size()) != ctx.dimension())
    throw ContractViolation(std::string(what) + ": dimension mismatch");
  if (u.degree() < 1 || u.degree() > u.dimension())
    throw ContractViolation(std::string(what) + ": degree must lie in 1..n");
}

// Largest s >= 0 with x + s w inside some support ball (0 if none).
double support_reach(const SampledForm& u, std::span<const double> x, std::span<const double> w) {
  double hi = 0.0;
  for (const auto& b : u.support()) {
    const Interval iv = line_ball(x, w, b);
    if (!iv.empty()) hi = std::max(hi, iv.hi);
  }
  return hi;
}

double form_scale(const SampledForm& u) {
  if (!u.compact()) return 1.0;
  const Box b = u.bounding_box();
  double s = 0.0;
  for (int i = 0; i < b.dimension(); ++i) s = std::max(s, b.hi[i] - b.lo[i]);
  return s;
}

double sup_of(std::span<const double> v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

BogovskiiContext::BogovskiiContext(ThetaBump t) : theta(std::move(t)), base(theta.support_ball()) {}

std::vector<double> bogovskii_T(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x,
                                DirectionStats* stats) {
  check_form(ctx, u, x, "bogovskii_T");
  if (!u.compact()) throw ContractViolation("bogovskii_T: u must be compactly supported");
  const int n = u.dimension(), l = u.degree();
  const std::size_t m_out = dense_layout(n, l - 1).size();
  const std::size_t m_in = u.size();
  const ThetaBump& th = ctx.theta;
  const GaussRule& g_rho = gauss_legendre((th.line_degree() + n) / 2 + 2);
  const GaussRule& g_s = gauss_legendre(ctx.line_points);

  std::vector<double> Th(l), I(l * m_in), val(m_in), y(n), back(n);
  auto f = [&](std::span<const double> w, std::span<double> out) {
    const Interval iv = intersect(th.line_support(x, w), Interval{0.0, kInf});
    if (iv.empty()) return;
    for (int i = 0; i < n; ++i) back[i] = -w[i];
    const double reach = support_reach(u, x, back);
    if (!(reach > 0.0)) return;

    std::fill(Th.begin(), Th.end(), 0.0);
    const double hr = 0.5 * (iv.hi - iv.lo), cr = 0.5 * (iv.hi + iv.lo);
    for (std::size_t q = 0; q < g_rho.nodes.size(); ++q) {
      const double rho = cr + hr * g_rho.nodes[q];
      for (int i = 0; i < n; ++i) y[i] = x[i] + rho * w[i];
      const double tv = th.eval(y) * hr * g_rho.weights[q];
      if (tv == 0.0) continue;
      for (int m = 0; m < l; ++m) Th[m] += tv * ipow(rho, n - 1 - m);
    }

    std::fill(I.begin(), I.end(), 0.0);
    const auto bps = line_breakpoints(u, x, back, 0.0, reach);
    for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
      const double a = bps[p], b = bps[p + 1];
      const double hs = 0.5 * (b - a), cs = 0.5 * (a + b);
      for (int i = 0; i < n; ++i) y[i] = x[i] - cs * w[i];
      if (!u.in_support(y)) continue;
      for (std::size_t q = 0; q < g_s.nodes.size(); ++q) {
        const double s = cs + hs * g_s.nodes[q];
        for (int i = 0; i < n; ++i) y[i] = x[i] - s * w[i];
        u.eval(y, val);
        const double ws = hs * g_s.weights[q];
        double sm = ws;
        for (int m = 0; m < l; ++m, sm *= s)
          for (std::size_t c = 0; c < m_in; ++c) I[m * m_in + c] += sm * val[c];
      }
    }
    for (int m = 0; m < l; ++m) {
      if (Th[m] == 0.0) continue;
      contract_dense(n, l, w, std::span<const double>(I.data() + m * m_in, m_in), out, binomial(l - 1, m) * Th[m]);
    }
  };

  std::vector<DirectionTarget> targets;
  targets.push_back({ctx.base, +1, 0});
  for (const auto& b : u.support()) targets.push_back({b, -1, 1});
  return integrate_directions(x, cube_around(x, 1.0), m_out, f, targets, ctx.directions, stats);
}

std::vector<double> poincare_R_numeric(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x,
                                       DirectionStats* stats) {
  check_form(ctx, u, x, "poincare_R_numeric");
  const int n = u.dimension(), l = u.degree();
  const std::size_t m_out = dense_layout(n, l - 1).size();
  const std::size_t m_in = u.size();
  const ThetaBump& th = ctx.theta;
  const GaussRule& g_rho = gauss_legendre((th.line_degree() + n) / 2 + 2);
  const GaussRule& g_s = gauss_legendre(ctx.line_points + (th.line_degree() + n) / 2);

  std::vector<double> acc(m_in), val(m_in), y(n);
  auto W = [&](std::span<const double> w, double s, double rin, double rout) {
    const double lo = std::max(s, rin);
    if (!(rout > lo)) return 0.0;
    const double h = 0.5 * (rout - lo), c = 0.5 * (rout + lo);
    double sum = 0.0;
    for (std::size_t q = 0; q < g_rho.nodes.size(); ++q) {
      const double rho = c + h * g_rho.nodes[q];
      for (int i = 0; i < n; ++i) y[i] = x[i] + rho * w[i];
      sum += g_rho.weights[q] * th.eval(y) * ipow(rho, n - l) * ipow(rho - s, l - 1);
    }
    return h * sum;
  };
  auto f = [&](std::span<const double> w, std::span<double> out) {
    const Interval iv = intersect(th.line_support(x, w), Interval{0.0, kInf});
    if (iv.empty()) return;
    auto bps = line_breakpoints(u, x, w, 0.0, iv.hi);
    if (iv.lo > 0.0 && iv.lo < iv.hi) {
      bps.push_back(iv.lo);
      std::sort(bps.begin(), bps.end());
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
      const double a = bps[p], b = bps[p + 1];
      if (!(b > a)) continue;
      const double hs = 0.5 * (b - a), cs = 0.5 * (a + b);
      for (int i = 0; i < n; ++i) y[i] = x[i] + cs * w[i];
      if (u.compact() && !u.in_support(y)) continue;
      for (std::size_t q = 0; q < g_s.nodes.size(); ++q) {
        const double s = cs + hs * g_s.nodes[q];
        const double ws = W(w, s, iv.lo, iv.hi);
        if (ws == 0.0) continue;
        for (int i = 0; i < n; ++i) y[i] = x[i] + s * w[i];
        u.eval(y, val);
        const double wt = hs * g_s.weights[q] * ws;
        for (std::size_t c = 0; c < m_in; ++c) acc[c] += wt * val[c];
      }
    }
    contract_dense(n, l, w, acc, out, -1.0);
  };

  std::vector<DirectionTarget> targets;
  targets.push_back({ctx.base, +1, 0});
  for (const auto& b : u.support()) targets.push_back({b, +1, 1});
  return integrate_directions(x, cube_around(x, 1.0), m_out, f, targets, ctx.directions, stats);
}

double poincare_R0_numeric(const BogovskiiContext& ctx, const SampledForm& u) {
  if (u.degree() != 0 || u.dimension() != ctx.dimension()) throw ContractViolation("R_0 needs a 0-form");
  const int n = u.dimension();
  const Box box = ctx.theta.support_box();
  const int panels = n <= 2 ? 8 : 4;
  std::vector<std::vector<double>> breaks(n);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p <= panels; ++p) breaks[i].push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * p / panels);
    for (const auto& pl : u.breaks().planes)
      if (pl.axis == i && pl.value > box.lo[i] && pl.value < box.hi[i]) breaks[i].push_back(pl.value);
    std::sort(breaks[i].begin(), breaks[i].end());
  }
  double out = 0.0;
  std::vector<double> v(1);
  integrate_box_cells(
      [&](std::span<const double> y, std::span<double> o) {
        u.eval(y, v);
        o[0] += ctx.theta.eval(y) * v[0];
      },
      breaks, n <= 2 ? ctx.line_points : 12, std::span<double>(&out, 1));
  return out;
}

std::vector<double> q_operator(const BogovskiiContext& ctx, const SampledForm& u, std::span<const double> x) {
  const int n = u.dimension(), l = u.degree();
  if (l < 0 || l > n - 1) throw ContractViolation("q_operator: degree must lie in 0..n-1");
  const SampledForm su = hodge(u);
  auto r = poincare_R_numeric(ctx, su, x);
  const int k = n - l - 1;  // degree of R(*u)
  std::vector<double> out(dense_layout(n, n - k).size());
  hodge_star_dense(n, k, r, out);
  const int sign = ((l - 1) % 2 == 0 ? 1 : -1) * ((k * (n - k)) % 2 == 0 ? 1 : -1);
  for (auto& v : out) v *= sign;
  return out;
}

std::vector<CubatureNode> support_cubature(int n, const std::vector<Ball>& balls, const Breaks& breaks,
                                           const Cubature& rule) {
  if (balls.empty()) throw ContractViolation("support_cubature: no support balls");
  bool concentric = breaks.planes.empty() && balls.size() == 1 && (n == 2 || n == 3);
  if (concentric)
    for (const auto& s : breaks.spheres) concentric = concentric && distance(s.center, balls[0].center) < 1e-14;

  std::vector<CubatureNode> nodes;
  if (concentric) {
    const Ball& B = balls[0];
    std::vector<double> radii{0.0, B.radius};
    for (const auto& s : breaks.spheres)
      if (s.radius > 0 && s.radius < B.radius) radii.push_back(s.radius);
    std::sort(radii.begin(), radii.end());
    const GaussRule& gr = gauss_legendre(rule.radial);
    const int na = rule.angular;
    auto radial = [&](std::span<const double> dir, double weight) {
      for (std::size_t p = 0; p + 1 < radii.size(); ++p) {
        const double h = 0.5 * (radii[p + 1] - radii[p]), c = 0.5 * (radii[p + 1] + radii[p]);
        for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
          const double r = c + h * gr.nodes[q];
          CubatureNode nd{std::vector<double>(n), weight * h * gr.weights[q] * ipow(r, n - 1)};
          for (int i = 0; i < n; ++i) nd.x[i] = B.center[i] + r * dir[i];
          nodes.push_back(std::move(nd));
        }
      }
    };
    std::vector<double> dir(n);
    if (n == 2) {
      for (int a = 0; a < na; ++a) {
        const double phi = 2 * std::numbers::pi * (a + 0.5) / na;
        dir[0] = std::cos(phi);
        dir[1] = std::sin(phi);
        radial(dir, 2 * std::numbers::pi / na);
      }
    } else {
      const GaussRule& gm = gauss_legendre(std::max(2, na / 2));
      for (std::size_t b = 0; b < gm.nodes.size(); ++b) {
        const double mu = gm.nodes[b], s = std::sqrt(1 - mu * mu);
        for (int a = 0; a < na; ++a) {
          const double phi = 2 * std::numbers::pi * (a + 0.5) / na;
          dir[0] = s * std::cos(phi);
          dir[1] = s * std::sin(phi);
          dir[2] = mu;
          radial(dir, gm.weights[b] * 2 * std::numbers::pi / na);
        }
      }
    }
    return nodes;
  }

  Box box;
  box.lo.assign(n, kInf);
  box.hi.assign(n, -kInf);
  for (const auto& b : balls)
    for (int i = 0; i < n; ++i) {
      box.lo[i] = std::min(box.lo[i], b.center[i] - b.radius);
      box.hi[i] = std::max(box.hi[i], b.center[i] + b.radius);
    }
  std::vector<std::vector<double>> cuts(n);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p <= rule.box_panels; ++p)
      cuts[i].push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * p / rule.box_panels);
    for (const auto& pl : breaks.planes)
      if (pl.axis == i && pl.value > box.lo[i] && pl.value < box.hi[i]) cuts[i].push_back(pl.value);
    if (n == 1)
      for (const auto& s : breaks.spheres)
        for (double v : {s.center[0] - s.radius, s.center[0] + s.radius})
          if (v > box.lo[0] && v < box.hi[0]) cuts[0].push_back(v);
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
  }
  // 1D node lists per axis, then their tensor product
  const GaussRule& g = gauss_legendre(rule.box_points);
  std::vector<std::vector<std::pair<double, double>>> axis(n);
  for (int i = 0; i < n; ++i)
    for (std::size_t c = 0; c + 1 < cuts[i].size(); ++c) {
      const double h = 0.5 * (cuts[i][c + 1] - cuts[i][c]), m = 0.5 * (cuts[i][c + 1] + cuts[i][c]);
      for (std::size_t q = 0; q < g.nodes.size(); ++q) axis[i].push_back({m + h * g.nodes[q], h * g.weights[q]});
    }
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = axis[i][idx[i]].first;
      w *= axis[i][idx[i]].second;
    }
    bool inside = false;
    for (const auto& b : balls) inside = inside || b.contains(x);
    if (inside) nodes.push_back({x, w});
    int i = 0;
    while (i < n && ++idx[i] == axis[i].size()) idx[i++] = 0;
    if (i == n) break;
  }
  return nodes;
}

void integrate_supported(int n, const std::vector<Ball>& balls, const Breaks& breaks,
                         const std::function<void(std::span<const double>, std::span<double>)>& f,
                         std::span<double> out, const Cubature& rule) {
  std::vector<double> tmp(out.size());
  for (const auto& nd : support_cubature(n, balls, breaks, rule)) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    f(nd.x, tmp);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += nd.w * tmp[c];
  }
}

std::vector<double> integral_of_form(const SampledForm& u, const Cubature& rule) {
  std::vector<double> out(u.size(), 0.0);
  integrate_supported(
      u.dimension(), u.support(), u.breaks(),
      [&](std::span<const double> y, std::span<double> o) {
        const auto v = u.eval(y);
        for (std::size_t c = 0; c < v.size(); ++c) o[c] += v[c];
      },
      out, rule);
  return out;
}

double l2_pairing(const SampledForm& a, const std::function<std::vector<double>(std::span<const double>)>& b,
                  const Cubature& rule) {
  const auto nodes = support_cubature(a.dimension(), a.support(), a.breaks(), rule);
  std::vector<double> contrib(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const auto av = a.eval(nodes[i].x);
    if (sup_of(av) == 0.0) return;
    const auto bv = b(nodes[i].x);
    double s = 0.0;
    for (std::size_t c = 0; c < bv.size(); ++c) s += av[c] * bv[c];
    contrib[i] = nodes[i].w * s;
  });
  double total = 0.0;
  for (double c : contrib) total += c;
  return total;
}

double AdjointResult::relative_defect() const {
  const double s = std::max(std::abs(lhs), std::abs(rhs));
  return s == 0.0 ? 0.0 : std::abs(lhs - rhs) / s;
}

AdjointResult adjoint_check(const BogovskiiContext& ctx, const SampledForm& u, const SampledForm& v) {
  const int n = ctx.dimension();
  if (u.dimension() != n || v.dimension() != n || v.degree() != u.degree() + 1)
    throw ContractViolation("adjoint_check: need u of degree l and v of degree l+1");
  AdjointResult r;
  r.lhs = l2_pairing(v, [&](std::span<const double> x) { return q_operator(ctx, u, x); }, ctx.cubature);
  r.rhs = l2_pairing(u, [&](std::span<const double> x) { return bogovskii_T(ctx, v, x); }, ctx.cubature);
  return r;
}

HomotopyReport homotopy_check_T(const BogovskiiContext& ctx, const SampledForm& u,
                                const std::vector<std::vector<double>>& points) {
  const int n = u.dimension(), l = u.degree();
  if (n != ctx.dimension()) throw ContractViolation("homotopy_check_T: dimension mismatch");
  if (l < n && !u.has_derivative()) throw ContractViolation("homotopy_check_T: u needs a derivative evaluator");
  HomotopyReport rep;
  rep.n = n;
  rep.l = l;
  rep.u_sup = u.sup_norm_estimate();
  std::vector<double> total;
  if (l == n) total = integral_of_form(u, ctx.cubature);
  const double h = ctx.fd_step * form_scale(u);
  rep.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const auto& x = points[p];
    std::vector<double> res = u.eval(x);
    for (auto& v : res) v = -v;
    if (l >= 1) {
      const auto dT = fd_exterior_derivative(
          n, l - 1, [&](std::span<const double> y) { return bogovskii_T(ctx, u, y); }, x, h, ctx.five_point);
      for (std::size_t c = 0; c < res.size(); ++c) res[c] += dT[c];
    }
    if (l < n) {
      const auto t = bogovskii_T(ctx, u.derivative(), x);
      for (std::size_t c = 0; c < res.size(); ++c) res[c] += t[c];
    } else {
      res[0] += total[0] * ctx.theta.eval(x);
    }
    rep.points[p] = {x, sup_of(res)};
  });
  for (const auto& pr : rep.points) rep.max_residual = std::max(rep.max_residual, pr.residual);
  return rep;
}

HomotopyReport homotopy_check_R(const BogovskiiContext& ctx, const SampledForm& u,
                                const std::vector<std::vector<double>>& points) {
  const int n = u.dimension(), l = u.degree();
  if (n != ctx.dimension()) throw ContractViolation("homotopy_check_R: dimension mismatch");
  if (l < n && !u.has_derivative()) throw ContractViolation("homotopy_check_R: u needs a derivative evaluator");
  HomotopyReport rep;
  rep.n = n;
  rep.l = l;
  rep.u_sup = u.compact() ? u.sup_norm_estimate() : 0.0;
  const double pair = l == 0 ? poincare_R0_numeric(ctx, u) : 0.0;
  const double h = ctx.fd_step * form_scale(u);
  rep.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const auto& x = points[p];
    std::vector<double> res = u.eval(x);
    for (auto& v : res) v = -v;
    if (l >= 1) {
      const auto dR = fd_exterior_derivative(
          n, l - 1, [&](std::span<const double> y) { return poincare_R_numeric(ctx, u, y); }, x, h, ctx.five_point);
      for (std::size_t c = 0; c < res.size(); ++c) res[c] += dR[c];
    }
    if (l < n) {
      const auto r = poincare_R_numeric(ctx, u.derivative(), x);
      for (std::size_t c = 0; c < res.size(); ++c) res[c] += r[c];
    }
    if (l == 0) res[0] += pair;
    rep.points[p] = {x, sup_of(res)};
  });
  for (const auto& pr : rep.points) rep.max_residual = std::max(rep.max_residual, pr.residual);
  return rep;
}

SupportReport support_check_T(const BogovskiiContext& ctx, const SampledForm& u,
                              const std::vector<std::vector<double>>& points) {
  SupportReport rep;
  rep.u_sup = u.sup_norm_estimate();
  std::vector<double> vals(points.size(), -1.0);
  parallel_for(points.size(), [&](std::size_t p) {
    for (const auto& b : u.support())
      if (in_starlike_hull(points[p], b, ctx.base, 1e-12)) return;
    vals[p] = sup_of(bogovskii_T(ctx, u, points[p]));
  });
  for (double v : vals)
    if (v >= 0.0) {
      ++rep.outside;
      rep.max_outside = std::max(rep.max_outside, v);
    }
  return rep;
}

std::vector<std::vector<double>> kronecker_points(const Box& box, int count, double margin) {
  const int n = box.dimension();
  // generalized golden ratio sequence (R_n)
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (n + 1));
  std::vector<double> alpha(n);
  for (int i = 0; i < n; ++i) alpha[i] = std::fmod(std::pow(1.0 / phi, i + 1), 1.0);
  std::vector<std::vector<double>> pts;
  for (int k = 1; k <= count; ++k) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      const double t = std::fmod(0.5 + alpha[i] * k, 1.0);
      const double lo = box.lo[i] + margin, hi = box.hi[i] - margin;
      x[i] = lo + (hi - lo) * t;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace derham
