#include "derham/glue.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "derham/errors.hpp"
#include "derham/kernel.hpp"
#include "derham/parallel.hpp"

namespace derham {

namespace {

double sup_of(std::span<const double> v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

void axpy(std::vector<double>& y, std::span<const double> x, double a = 1.0) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Box make_box(std::vector<double> lo, std::vector<double> hi) { return Box{std::move(lo), std::move(hi)}; }

double fd_step(const CoverContext& c, const BogovskiiContext& op) {
  const Box b = c.domain.bounding_box();
  double s = 0.0;
  for (int i = 0; i < b.dimension(); ++i) s = std::max(s, b.hi[i] - b.lo[i]);
  return op.fd_step * s;
}

void check_degree(const CoverContext& c, const SampledForm& u, const char* what) {
  if (u.dimension() != c.dimension()) throw ContractViolation(std::string(what) + ": dimension mismatch");
}

}  // namespace

bool Region::contains(std::span<const double> x, double tol) const {
  for (const auto& b : boxes)
    if (b.contains(x, tol)) return true;
  return false;
}

bool Region::contains_cube(std::span<const double> x, double m) const {
  const int n = dimension();
  // cells of the cube cut by every box face inside it; each cell is inside
  // the union iff its midpoint is
  std::vector<std::vector<double>> cuts(n);
  for (int i = 0; i < n; ++i) {
    cuts[i] = {x[i] - m, x[i] + m};
    for (const auto& b : boxes)
      for (double v : {b.lo[i], b.hi[i]})
        if (v > x[i] - m && v < x[i] + m) cuts[i].push_back(v);
    std::sort(cuts[i].begin(), cuts[i].end());
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> mid(n);
  while (true) {
    for (int i = 0; i < n; ++i) mid[i] = 0.5 * (cuts[i][idx[i]] + cuts[i][idx[i] + 1]);
    if (!contains(mid, 0.0)) return false;
    int i = 0;
    while (i < n && ++idx[i] + 1 == cuts[i].size()) idx[i++] = 0;
    if (i == n) return true;
  }
}

double Region::distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) {
    double d = 0.0;
    for (int i = 0; i < b.dimension(); ++i) {
      const double e = std::max({b.lo[i] - x[i], 0.0, x[i] - b.hi[i]});
      d += e * e;
    }
    best = std::min(best, std::sqrt(d));
  }
  return best;
}

Box Region::bounding_box() const {
  if (boxes.empty()) throw ContractViolation("empty region");
  Box r = boxes[0];
  for (const auto& b : boxes)
    for (int i = 0; i < b.dimension(); ++i) {
      r.lo[i] = std::min(r.lo[i], b.lo[i]);
      r.hi[i] = std::max(r.hi[i], b.hi[i]);
    }
  return r;
}

double Region::diameter() const {
  // corners of the boxes realize the diameter of the union
  std::vector<std::vector<double>> corners;
  for (const auto& b : boxes) {
    const int n = b.dimension();
    for (int m = 0; m < (1 << n); ++m) {
      std::vector<double> c(n);
      for (int i = 0; i < n; ++i) c[i] = (m >> i) & 1 ? b.hi[i] : b.lo[i];
      corners.push_back(c);
    }
  }
  double d = 0.0;
  for (const auto& a : corners)
    for (const auto& b : corners) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      d = std::max(d, std::sqrt(s));
    }
  return d;
}

CoverContext make_cover(std::string name, Region domain, std::vector<StarlikePiece> pieces,
                        const std::vector<std::vector<RampFactor>>& factors, int ramp_k, double margin_fraction) {
  if (pieces.empty()) throw ContractViolation("make_cover: no pieces");
  if (factors.size() + 1 != pieces.size()) throw ContractViolation("make_cover: need one factor list per piece but the last");
  const int n = domain.dimension();
  CoverContext c;
  c.name = std::move(name);
  c.domain = std::move(domain);
  c.margin = margin_fraction * c.domain.diameter();
  c.factors = factors;
  c.ramp_k = ramp_k;
  c.margin_fraction = margin_fraction;
  std::vector<ScalarField> f;
  for (const auto& fl : factors) {
    ScalarField p = constant_field(n, 1.0);
    for (const auto& r : fl) {
      if (r.axis < 0 || r.axis >= n || !(r.b > r.a)) throw ContractViolation("make_cover: bad ramp");
      p = product(p, r.up ? ramp_up_field(n, r.axis, r.a, r.b, ramp_k) : ramp_down_field(n, r.axis, r.a, r.b, ramp_k));
    }
    f.push_back(p);
  }
  ScalarField rest = constant_field(n, 1.0);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i + 1 < pieces.size()) {
      c.chi.push_back(product(f[i], rest));
      rest = product(rest, one_minus(f[i]));
    } else {
      c.chi.push_back(rest);
    }
  }
  for (const auto& p : pieces) c.operators.emplace_back(p.theta);
  for (std::size_t i = 0; i < pieces.size(); ++i) c.operators[i].base = pieces[i].base;
  c.pieces = std::move(pieces);
  return c;
}

CoverContext l_domain_cover(int theta_k, int ramp_k) {
  Region omega{{make_box({0, 0}, {2, 1}), make_box({0, 0}, {1, 2})}};
  const Ball ba{{0.5, 0.8}, 0.15}, bb{{0.8, 0.5}, 0.15};
  std::vector<StarlikePiece> pieces{
      {"A", Region{{make_box({0, 0}, {1, 2}), make_box({1, 0}, {1.5, 1})}}, ba, inscribed_tensor_bump(ba, theta_k)},
      {"B", Region{{make_box({0, 0}, {2, 1}), make_box({0, 1}, {1, 1.5})}}, bb, inscribed_tensor_bump(bb, theta_k)}};
  // each piece is a union of two boxes that both contain its ball
  return make_cover("L", omega, pieces, {{{1, true, 0.8, 1.3}, {0, false, 1.05, 1.45}}}, ramp_k);
}

CoverContext u_domain_cover(int theta_k, int ramp_k) {
  Region omega{{make_box({0, 0}, {3, 1}), make_box({0, 0}, {1, 2}), make_box({2, 0}, {3, 2})}};
  const Ball bl{{0.5, 0.8}, 0.15}, br{{2.5, 0.8}, 0.15}, bm{{1.5, 0.5}, 0.3};
  std::vector<StarlikePiece> pieces{
      {"left", Region{{make_box({0, 0}, {1, 2}), make_box({1, 0}, {1.5, 1})}}, bl, inscribed_tensor_bump(bl, theta_k)},
      {"right", Region{{make_box({2, 0}, {3, 2}), make_box({1.5, 0}, {2, 1})}}, br, inscribed_tensor_bump(br, theta_k)},
      {"middle", Region{{make_box({0, 0}, {3, 1})}}, bm, inscribed_tensor_bump(bm, theta_k)}};
  return make_cover("U", omega, pieces,
                    {{{1, true, 0.55, 1.0}, {0, false, 1.05, 1.45}}, {{1, true, 0.55, 1.0}, {0, true, 1.55, 1.95}}},
                    ramp_k);
}

CoverContext flat_cover(const Box& box, const Ball& base, int theta_k) {
  std::vector<StarlikePiece> pieces{{"all", Region{{box}}, base, inscribed_tensor_bump(base, theta_k)}};
  return make_cover("flat", Region{{box}}, pieces, {});
}

namespace {

Box box_from_json(const nlohmann::json& j) {
  Box b{j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>()};
  if (b.lo.size() != b.hi.size() || b.lo.empty()) throw ConfigError("box: lo and hi must have the same nonzero length");
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(b.hi[i] > b.lo[i])) throw ConfigError("box: empty extent");
  return b;
}

Region region_from_json(const nlohmann::json& j) {
  Region r;
  for (const auto& b : j) r.boxes.push_back(box_from_json(b));
  if (r.boxes.empty()) throw ConfigError("region: no boxes");
  return r;
}

nlohmann::json box_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

}  // namespace

CoverContext cover_from_json(const nlohmann::json& j) {
  try {
    const Region omega = region_from_json(j.at("domain"));
    std::vector<StarlikePiece> pieces;
    std::vector<std::vector<RampFactor>> factors;
    const auto& pj = j.at("pieces");
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const auto& p = pj[i];
      StarlikePiece s;
      s.name = p.value("name", "piece" + std::to_string(i));
      s.region = region_from_json(p.at("region"));
      s.base = Ball{p.at("ball").at("center").get<std::vector<double>>(), p.at("ball").at("radius").get<double>()};
      s.theta = p.contains("theta") ? bump_from_json(p.at("theta")) : inscribed_tensor_bump(s.base, p.value("theta_k", 3));
      pieces.push_back(std::move(s));
      if (i + 1 < pj.size()) {
        std::vector<RampFactor> f;
        for (const auto& r : p.at("factor")) {
          const std::string dir = r.at("dir").get<std::string>();
          if (dir != "up" && dir != "down") throw ConfigError("ramp dir must be up or down");
          f.push_back({r.at("axis").get<int>(), dir == "up", r.at("a").get<double>(), r.at("b").get<double>()});
        }
        factors.push_back(std::move(f));
      }
    }
    return make_cover(j.value("name", std::string("custom")), omega, pieces, factors, j.value("ramp_k", 3),
                      j.value("margin_fraction", 0.05));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cover JSON: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("cover JSON: ") + e.what());
  }
}

CoverContext cover_by_name(const std::string& name) {
  if (name == "L") return l_domain_cover();
  if (name == "U") return u_domain_cover();
  std::ifstream in(name);
  if (!in) throw ConfigError("unknown cover '" + name + "' (expected L, U or a JSON file)");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cover file " + name + ": " + e.what());
  }
  return cover_from_json(j);
}

nlohmann::json to_json(const CoverContext& c) {
  nlohmann::json d = nlohmann::json::array(), p = nlohmann::json::array();
  for (const auto& b : c.domain.boxes) d.push_back(box_json(b));
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const auto& s = c.pieces[i];
    nlohmann::json r = nlohmann::json::array();
    for (const auto& b : s.region.boxes) r.push_back(box_json(b));
    nlohmann::json q{{"name", s.name},
                     {"region", r},
                     {"ball", {{"center", s.base.center}, {"radius", s.base.radius}}},
                     {"theta", s.theta.to_json()}};
    if (i < c.factors.size()) {
      nlohmann::json f = nlohmann::json::array();
      for (const auto& rf : c.factors[i])
        f.push_back({{"axis", rf.axis}, {"dir", rf.up ? "up" : "down"}, {"a", rf.a}, {"b", rf.b}});
      q["factor"] = f;
    }
    p.push_back(q);
  }
  return {{"name", c.name},         {"domain", d},
          {"pieces", p},            {"ramp_k", c.ramp_k},
          {"margin_fraction", c.margin_fraction}};
}

std::vector<double> composite_R(const CoverContext& c, const SampledForm& u, std::span<const double> x) {
  check_degree(c, u, "composite_R");
  const int n = c.dimension(), l = u.degree();
  if (l < 1) throw ContractViolation("composite_R: degree must lie in 1..n");
  std::vector<double> out(dense_layout(n, l - 1).size(), 0.0);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const double w = c.chi[i].value(x);
    if (w == 0.0) continue;
    axpy(out, poincare_R_numeric(c.operators[i], u, x), w);
  }
  return out;
}

std::vector<double> composite_T(const CoverContext& c, const SampledForm& u, std::span<const double> x) {
  check_degree(c, u, "composite_T");
  const int n = c.dimension(), l = u.degree();
  if (l < 1) throw ContractViolation("composite_T: degree must lie in 1..n");
  std::vector<double> out(dense_layout(n, l - 1).size(), 0.0);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) axpy(out, bogovskii_T(c.operators[i], scaled(c.chi[i], u), x));
  return out;
}

namespace {

// (theta_i, u) for a 0-form
std::vector<double> theta_pairs(const CoverContext& c, const SampledForm& u) {
  std::vector<double> p;
  for (const auto& op : c.operators) p.push_back(poincare_R0_numeric(op, u));
  return p;
}

// (int chi_i u) for an n-form
std::vector<double> piece_integrals(const CoverContext& c, const SampledForm& u, const Cubature& rule) {
  std::vector<double> p;
  for (const auto& chi : c.chi) p.push_back(integral_of_form(scaled(chi, u), rule)[0]);
  return p;
}

std::vector<double> K_with(const CoverContext& c, const SampledForm& u, std::span<const double> x,
                           const std::vector<double>& pairs) {
  const int n = c.dimension(), l = u.degree();
  std::vector<double> out(dense_layout(n, l).size(), 0.0);
  if (l == 0) {
    for (std::size_t i = 0; i < c.pieces.size(); ++i) out[0] += pairs[i] * c.chi[i].value(x);
    return out;
  }
  std::vector<double> g(n);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    c.chi[i].gradient(x, g);
    if (sup_of(g) == 0.0) continue;
    const auto r = poincare_R_numeric(c.operators[i], u, x);
    wedge_one_form_dense(n, l - 1, g, r, out, -1.0);
  }
  return out;
}

// wedges dchi_i ^ u, built once per input
std::vector<SampledForm> gradient_wedges(const CoverContext& c, const SampledForm& u) {
  std::vector<SampledForm> w;
  for (const auto& chi : c.chi) w.push_back(gradient_wedge(chi, u));
  return w;
}

std::vector<double> L_with(const CoverContext& c, const SampledForm& u, std::span<const double> x,
                           const std::vector<SampledForm>& wedges, const std::vector<double>& integrals) {
  const int n = c.dimension(), l = u.degree();
  std::vector<double> out(dense_layout(n, l).size(), 0.0);
  if (l == n) {
    for (std::size_t i = 0; i < c.pieces.size(); ++i) out[0] += integrals[i] * c.pieces[i].theta.eval(x);
    return out;
  }
  for (std::size_t i = 0; i < c.pieces.size(); ++i) axpy(out, bogovskii_T(c.operators[i], wedges[i], x));
  return out;
}

std::vector<double> T_sum(const CoverContext& c, const std::vector<SampledForm>& chi_u, std::span<const double> x,
                          std::size_t size) {
  std::vector<double> out(size, 0.0);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) axpy(out, bogovskii_T(c.operators[i], chi_u[i], x));
  return out;
}

std::vector<SampledForm> scaled_all(const CoverContext& c, const SampledForm& u) {
  std::vector<SampledForm> s;
  for (const auto& chi : c.chi) s.push_back(scaled(chi, u));
  return s;
}

GlueResidual finish(int n, int l, const std::vector<std::vector<double>>& points, std::vector<double> res, double ref) {
  GlueResidual r;
  r.n = n;
  r.l = l;
  r.reference = ref;
  for (std::size_t p = 0; p < points.size(); ++p) {
    r.points.push_back({points[p], res[p]});
    r.max_residual = std::max(r.max_residual, res[p]);
  }
  return r;
}

}  // namespace

std::vector<double> remainder_K(const CoverContext& c, const SampledForm& u, std::span<const double> x) {
  check_degree(c, u, "remainder_K");
  return K_with(c, u, x, u.degree() == 0 ? theta_pairs(c, u) : std::vector<double>{});
}

std::vector<double> remainder_L(const CoverContext& c, const SampledForm& u, std::span<const double> x) {
  check_degree(c, u, "remainder_L");
  const int n = c.dimension();
  if (u.degree() == n) return L_with(c, u, x, {}, piece_integrals(c, u, c.operators[0].cubature));
  return L_with(c, u, x, gradient_wedges(c, u), {});
}

std::vector<std::vector<double>> interior_points(const CoverContext& c, int count) {
  const Box b = c.domain.bounding_box();
  std::vector<std::vector<double>> out;
  int batch = 8 * count;
  while (static_cast<int>(out.size()) < count && batch < (1 << 22)) {
    out.clear();
    for (auto& x : kronecker_points(b, batch))
      if (c.domain.contains_cube(x, c.margin)) {
        out.push_back(x);
        if (static_cast<int>(out.size()) == count) break;
      }
    batch *= 4;
  }
  if (static_cast<int>(out.size()) < count) throw ContractViolation("interior_points: margin leaves no room");
  return out;
}

std::vector<std::vector<double>> exterior_points(const CoverContext& c, int count, double gap) {
  Box b = c.domain.bounding_box();
  for (int i = 0; i < b.dimension(); ++i) {
    b.lo[i] -= 0.5;
    b.hi[i] += 0.5;
  }
  std::vector<std::vector<double>> out;
  for (auto& x : kronecker_points(b, 16 * count))
    if (c.domain.distance(x) >= gap) {
      out.push_back(x);
      if (static_cast<int>(out.size()) == count) break;
    }
  return out;
}

GlueResidual glue_homotopy_R(const CoverContext& c, const SampledForm& u,
                             const std::vector<std::vector<double>>& points) {
  check_degree(c, u, "glue_homotopy_R");
  const int n = c.dimension(), l = u.degree();
  if (l < n && !u.has_derivative()) throw ContractViolation("glue_homotopy_R: u needs a derivative evaluator");
  const auto pairs = l == 0 ? theta_pairs(c, u) : std::vector<double>{};
  const double h = fd_step(c, c.operators[0]);
  std::vector<double> res(points.size()), sup(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const auto& x = points[p];
    auto r = u.eval(x);
    sup[p] = sup_of(r);
    for (auto& v : r) v = -v;
    if (l >= 1)
      axpy(r, fd_exterior_derivative(
                  n, l - 1, [&](std::span<const double> y) { return composite_R(c, u, y); }, x, h,
                  c.operators[0].five_point));
    if (l < n) axpy(r, composite_R(c, u.derivative(), x));
    axpy(r, K_with(c, u, x, pairs));
    res[p] = sup_of(r);
  });
  return finish(n, l, points, res, *std::max_element(sup.begin(), sup.end()));
}

GlueResidual glue_homotopy_T(const CoverContext& c, const SampledForm& u,
                             const std::vector<std::vector<double>>& points) {
  check_degree(c, u, "glue_homotopy_T");
  const int n = c.dimension(), l = u.degree();
  if (!u.compact()) throw ContractViolation("glue_homotopy_T: u must be compactly supported");
  if (l < n && !u.has_derivative()) throw ContractViolation("glue_homotopy_T: u needs a derivative evaluator");
  const auto chi_u = scaled_all(c, u);
  std::vector<SampledForm> chi_du, wedges;
  if (l < n) {
    chi_du = scaled_all(c, u.derivative());
    wedges = gradient_wedges(c, u);
  }
  const auto integrals = l == n ? piece_integrals(c, u, c.operators[0].cubature) : std::vector<double>{};
  const double h = fd_step(c, c.operators[0]);
  const std::size_t lower = l >= 1 ? dense_layout(n, l - 1).size() : 0, same = dense_layout(n, l).size();
  std::vector<double> res(points.size()), sup(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const auto& x = points[p];
    auto r = u.eval(x);
    sup[p] = sup_of(r);
    for (auto& v : r) v = -v;
    if (l >= 1)
      axpy(r, fd_exterior_derivative(
                  n, l - 1, [&](std::span<const double> y) { return T_sum(c, chi_u, y, lower); }, x, h,
                  c.operators[0].five_point));
    if (l < n) axpy(r, T_sum(c, chi_du, x, same));
    axpy(r, L_with(c, u, x, wedges, integrals));
    res[p] = sup_of(r);
  });
  return finish(n, l, points, res, *std::max_element(sup.begin(), sup.end()));
}

CommutationResult commutation_check(const CoverContext& c, const SampledForm& u,
                                    const std::vector<std::vector<double>>& points) {
  check_degree(c, u, "commutation_check");
  const int n = c.dimension(), l = u.degree();
  CommutationResult out;
  if (l == n) {
    // d of an n-form and K_{n+1}, L_{n+1} all vanish
    out.K = finish(n, l, points, std::vector<double>(points.size(), 0.0), 0.0);
    out.L = out.K;
    return out;
  }
  if (!u.has_derivative()) throw ContractViolation("commutation_check: u needs a derivative evaluator");
  const SampledForm& du = u.derivative();
  const auto pairs = l == 0 ? theta_pairs(c, u) : std::vector<double>{};
  const double h = fd_step(c, c.operators[0]);
  const bool five = c.operators[0].five_point;

  std::vector<double> rk(points.size()), rl(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t p) {
    const auto& x = points[p];
    auto r = fd_exterior_derivative(n, l, [&](std::span<const double> y) { return K_with(c, u, y, pairs); }, x, h, five);
    axpy(r, K_with(c, du, x, {}), -1.0);
    rk[p] = sup_of(r);
  });

  if (u.compact()) {
    const auto wedges = gradient_wedges(c, u);
    const bool top = l + 1 == n;
    const auto wedges_d = top ? std::vector<SampledForm>{} : gradient_wedges(c, du);
    const auto integrals = top ? piece_integrals(c, du, c.operators[0].cubature) : std::vector<double>{};
    parallel_for(points.size(), [&](std::size_t p) {
      const auto& x = points[p];
      auto r = fd_exterior_derivative(
          n, l, [&](std::span<const double> y) { return L_with(c, u, y, wedges, {}); }, x, h, five);
      axpy(r, L_with(c, du, x, wedges_d, integrals), -1.0);
      rl[p] = sup_of(r);
    });
  }
  double ref = 0.0;
  for (const auto& x : points) ref = std::max(ref, sup_of(u.eval(x)));
  out.K = finish(n, l, points, rk, ref);
  out.L = finish(n, l, points, rl, ref);
  return out;
}

GlueSupportReport composite_T_support(const CoverContext& c, const SampledForm& u,
                                      const std::vector<std::vector<double>>& points) {
  const auto chi_u = scaled_all(c, u);
  const std::size_t m = dense_layout(c.dimension(), u.degree() - 1).size();
  std::vector<double> v(points.size());
  parallel_for(points.size(), [&](std::size_t p) { v[p] = sup_of(T_sum(c, chi_u, points[p], m)); });
  GlueSupportReport r;
  r.points = static_cast<int>(points.size());
  r.u_sup = u.sup_norm_estimate();
  r.max_value = points.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  return r;
}

GlueSupportReport composite_R_locality(const CoverContext& c, const SampledForm& u,
                                       const std::vector<std::vector<double>>& points) {
  std::vector<double> v(points.size());
  parallel_for(points.size(), [&](std::size_t p) { v[p] = sup_of(composite_R(c, u, points[p])); });
  GlueSupportReport r;
  r.points = static_cast<int>(points.size());
  r.u_sup = u.compact() ? u.sup_norm_estimate() : 0.0;
  r.max_value = points.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  return r;
}

CoverGeometryReport check_cover_geometry(const CoverContext& c, int per_axis) {
  const int n = c.dimension();
  CoverGeometryReport rep;
  auto grid = [&](const Box& b, int k, auto&& f) {
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
      for (int i = 0; i < n; ++i) x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * idx[i] / (k - 1);
      f(x);
      int i = 0;
      while (i < n && ++idx[i] == k) idx[i++] = 0;
      if (i == n) return;
    }
  };

  // starlike: segments from grid points of each piece to points of B_i
  for (const auto& piece : c.pieces) {
    std::vector<std::vector<double>> bpts{piece.base.center};
    for (const auto& w : sphere_directions(n, 16))
      for (double f : {0.5, 1.0}) {
        std::vector<double> b(n);
        for (int i = 0; i < n; ++i) b[i] = piece.base.center[i] + f * piece.base.radius * w[i];
        bpts.push_back(b);
      }
    for (const auto& box : piece.region.boxes)
      grid(box, 9, [&](const std::vector<double>& x) {
        for (const auto& b : bpts) {
          ++rep.starlike_segments;
          std::vector<double> y(n);
          for (int s = 1; s < 64; ++s) {
            for (int i = 0; i < n; ++i) y[i] = x[i] + (b[i] - x[i]) * s / 64.0;
            if (!piece.region.contains(y)) {
              ++rep.starlike_violations;
              break;
            }
          }
        }
      });
  }

  // cover, partition and supports on the closed domain and a neighborhood
  Box nb = c.domain.bounding_box();
  for (int i = 0; i < n; ++i) {
    nb.lo[i] -= 0.1;
    nb.hi[i] += 0.1;
  }
  auto cover_at = [&](const std::vector<double>& x) {
    ++rep.cover_samples;
    bool covered = false;
    for (std::size_t i = 0; i < c.pieces.size(); ++i) {
      const bool inside = c.pieces[i].region.contains(x);
      covered = covered || inside;
      if (!inside && c.chi[i].value(x) != 0.0) ++rep.support_violations;
    }
    if (!covered) ++rep.uncovered;
  };
  grid(nb, per_axis, [&](const std::vector<double>& x) {
    ++rep.partition_samples;
    double s = 0.0;
    for (const auto& chi : c.chi) s += chi.value(x);
    rep.partition_defect = std::max(rep.partition_defect, std::abs(s - 1.0));
    if (c.domain.contains(x)) cover_at(x);
  });
  for (const auto& box : c.domain.boxes) grid(box, per_axis, cover_at);
  return rep;
}

DegenerationReport degeneration_check(const CoverContext& flat, const SampledForm& u,
                                      const std::vector<std::vector<double>>& points) {
  if (flat.pieces.size() != 1) throw ContractViolation("degeneration_check: needs a one-piece cover");
  const int n = flat.dimension(), l = u.degree();
  const BogovskiiContext& op = flat.operators[0];
  DegenerationReport r;
  std::vector<DegenerationReport> per(points.size());
  const double pair = l == 0 ? poincare_R0_numeric(op, u) : 0.0;
  parallel_for(points.size(), [&](std::size_t p) {
    const auto& x = points[p];
    auto diff = [](std::vector<double> a, const std::vector<double>& b) {
      axpy(a, b, -1.0);
      return sup_of(a);
    };
    if (l >= 1) {
      per[p].R = diff(composite_R(flat, u, x), poincare_R_numeric(op, u, x));
      if (u.compact()) per[p].T = diff(composite_T(flat, u, x), bogovskii_T(op, u, x));
      per[p].K = sup_of(remainder_K(flat, u, x));
    } else {
      per[p].K = std::abs(remainder_K(flat, u, x)[0] - pair);
    }
    if (l < n && u.compact()) per[p].L = sup_of(remainder_L(flat, u, x));
  });
  for (const auto& d : per) {
    r.R = std::max(r.R, d.R);
    r.T = std::max(r.T, d.T);
    r.K = std::max(r.K, d.K);
    r.L = std::max(r.L, d.L);
  }
  return r;
}

}  // namespace derham
