#include "derham/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "derham/errors.hpp"
#include "derham/glue.hpp"
#include "derham/identities.hpp"
#include "derham/kernel.hpp"
#include "derham/parallel.hpp"
#include "derham/poincare.hpp"
#include "derham/profiles.hpp"
#include "derham/schema.hpp"
#include "derham/symbol.hpp"

namespace derham {

using nlohmann::json;

nlohmann::json RunConfig::to_json() const {
  json j;
  j["suite"] = suite;
  if (!dims.empty()) j["dims"] = dims;
  if (l) j["l"] = *l;
  j["degree"] = degree;
  j["seed"] = seed;
  j["forms"] = forms;
  j["points"] = points;
  j["pairs"] = pairs;
  j["kernel_pairs"] = kernel_pairs;
  if (theta) j["theta"] = *theta;
  j["quadrature"] = {{"radial", cubature.radial},         {"angular", cubature.angular},
                     {"box_points", cubature.box_points}, {"box_panels", cubature.box_panels},
                     {"line_points", line_points},        {"fd_step", fd_step},
                     {"five_point", five_point}};
  j["symbol"] = {{"xi_max", symbol.xi_max},
                 {"directions", symbol.directions},
                 {"per_decade", symbol.per_decade},
                 {"plateau_from", symbol.plateau_from},
                 {"tau_max", symbol.tau_max},
                 {"panel_points", symbol.panel_points},
                 {"consistency", symbol.consistency}};
  j["cover"] = cover;
  j["tolerances"] = {{"T_homotopy", tol.T_homotopy},
                     {"R_homotopy", tol.R_homotopy},
                     {"R_exact", tol.R_exact},
                     {"support", tol.support},
                     {"adjoint", tol.adjoint},
                     {"kernel", tol.kernel},
                     {"weak_singularity", tol.weak_singularity},
                     {"plateau", tol.plateau},
                     {"symbol_zero", tol.symbol_zero},
                     {"consistency", tol.consistency},
                     {"glue", tol.glue},
                     {"commutation", tol.commutation},
                     {"degeneration", tol.degeneration}};
  j["out"] = out;
  j["format"] = format;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  const auto problems = schema_violations(run_config_schema(), j);
  if (!problems.empty()) {
    std::string msg = "config does not match the schema:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  RunConfig c;
  c.suite = j.value("suite", c.suite);
  if (j.contains("dims")) c.dims = j["dims"].get<std::vector<int>>();
  if (j.contains("n")) c.dims = {j["n"].get<int>()};
  if (j.contains("l")) c.l = j["l"].get<int>();
  c.degree = j.value("degree", c.degree);
  c.seed = j.value("seed", c.seed);
  c.forms = j.value("forms", c.forms);
  c.points = j.value("points", c.points);
  c.pairs = j.value("pairs", c.pairs);
  c.kernel_pairs = j.value("kernel_pairs", c.kernel_pairs);
  if (j.contains("theta")) c.theta = j["theta"];
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    c.cubature.radial = q.value("radial", c.cubature.radial);
    c.cubature.angular = q.value("angular", c.cubature.angular);
    c.cubature.box_points = q.value("box_points", c.cubature.box_points);
    c.cubature.box_panels = q.value("box_panels", c.cubature.box_panels);
    c.line_points = q.value("line_points", c.line_points);
    c.fd_step = q.value("fd_step", c.fd_step);
    c.five_point = q.value("five_point", c.five_point);
  }
  if (j.contains("symbol")) {
    const auto& s = j["symbol"];
    c.symbol.xi_max = s.value("xi_max", c.symbol.xi_max);
    c.symbol.directions = s.value("directions", c.symbol.directions);
    c.symbol.per_decade = s.value("per_decade", c.symbol.per_decade);
    c.symbol.plateau_from = s.value("plateau_from", c.symbol.plateau_from);
    c.symbol.tau_max = s.value("tau_max", c.symbol.tau_max);
    c.symbol.panel_points = s.value("panel_points", c.symbol.panel_points);
    c.symbol.consistency = s.value("consistency", c.symbol.consistency);
  }
  c.cover = j.value("cover", c.cover);
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    auto& T = c.tol;
    T.T_homotopy = t.value("T_homotopy", T.T_homotopy);
    T.R_homotopy = t.value("R_homotopy", T.R_homotopy);
    T.R_exact = t.value("R_exact", T.R_exact);
    T.support = t.value("support", T.support);
    T.adjoint = t.value("adjoint", T.adjoint);
    T.kernel = t.value("kernel", T.kernel);
    T.weak_singularity = t.value("weak_singularity", T.weak_singularity);
    T.plateau = t.value("plateau", T.plateau);
    T.symbol_zero = t.value("symbol_zero", T.symbol_zero);
    T.consistency = t.value("consistency", T.consistency);
    T.glue = t.value("glue", T.glue);
    T.commutation = t.value("commutation", T.commutation);
    T.degeneration = t.value("degeneration", T.degeneration);
  }
  c.out = j.value("out", c.out);
  c.format = j.value("format", c.format);
  return c;
}

RunConfig config_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "poincare", "qspace",  "closed-forms", "bogovskii",
                                              "support", "duality",  "kernel",  "symbol",       "glue"};
  return names;
}

namespace {

std::string tag(int n, int l) { return "n" + std::to_string(n) + "/l" + std::to_string(l); }

std::vector<int> dims_or(const RunConfig& c, std::vector<int> fallback) { return c.dims.empty() ? fallback : c.dims; }

std::vector<int> degrees(const RunConfig& c, int lo, int hi) {
  std::vector<int> out;
  for (int l = lo; l <= hi; ++l)
    if (!c.l || *c.l == l) out.push_back(l);
  return out;
}

std::uint64_t salt(const RunConfig& c, int n, int l, int extra = 0) {
  return c.seed * 1000003ull + static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(l) * 10 +
         static_cast<std::uint64_t>(extra);
}

std::vector<Rational> fill(int n, const Rational& v) { return std::vector<Rational>(static_cast<std::size_t>(n), v); }

// theta from the config, or the suite's fixture
ThetaBump theta_for(const RunConfig& c, int n, const ThetaBump& fallback) {
  if (!c.theta) return fallback;
  json j = *c.theta;
  j["n"] = n;
  return bump_from_json(j);
}

ThetaBump shifted_theta(const RunConfig& c, int n) {
  return theta_for(c, n, make_tensor_bump(n, fill(n, Rational(1, 4)), Rational(1, 2), 2));
}

BogovskiiContext bogovskii_context(const RunConfig& c, const ThetaBump& theta) {
  BogovskiiContext ctx(theta);
  ctx.cubature = c.cubature;
  ctx.line_points = c.line_points;
  ctx.fd_step = c.fd_step;
  ctx.five_point = c.five_point;
  return ctx;
}

Box cube(int n, double lo, double hi) {
  return Box{std::vector<double>(static_cast<std::size_t>(n), lo), std::vector<double>(static_cast<std::size_t>(n), hi)};
}

// (1 - |x-c|^2/R^2)^k times a random quadratic l-form
SampledForm bump_fixture(int n, int l, std::vector<double> centre, double radius, int k, std::mt19937_64& rng) {
  return profile_form(radial_bump_field(centre, radius, k), random_polyform(n, l, 2, rng));
}

json theta_json(const ThetaBump& t) { return t.to_json(); }

Table residual_table(const std::string& name, int n, const std::vector<PointResidual>& pts) {
  Table t;
  t.name = name;
  for (int i = 1; i <= n; ++i) t.columns.push_back("x" + std::to_string(i));
  t.columns.push_back("residual");
  for (const auto& p : pts) {
    auto row = p.x;
    row.push_back(p.residual);
    t.rows.push_back(std::move(row));
  }
  return t;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

// ---------------------------------------------------------------- suites

void suite_algebra(const RunConfig& c, Report& r) {
  static const char* slugs[] = {"starstar", "starwedge", "starprod", "prodcontr", "antiderivation", "norm", "anticommute"};
  for (int n : dims_or(c, {1, 2, 3, 4})) {
    const auto tallies = exterior_identities(n, 50, c.seed);
    for (std::size_t i = 0; i < tallies.size(); ++i) {
      const auto& t = tallies[i];
      r.add("n" + std::to_string(n) + "/" + slugs[i], t.name, {{"n", n}, {"seed", c.seed}, {"identity", slugs[i]}},
            static_cast<double>(t.failures), 0.0, {{"cases", t.cases}, {"first_failure", t.first_failure}});
    }
    if (n == 3) {
      const auto t = r3_correspondence(200, c.seed);
      r.add("n3/cross-dot", t.name, {{"n", 3}, {"seed", c.seed}, {"identity", "cross-dot"}},
            static_cast<double>(t.failures), 0.0, {{"cases", t.cases}, {"first_failure", t.first_failure}});
    }
  }
}

void suite_poincare(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {2, 3, 4})) {
    const ThetaBump theta = shifted_theta(c, n);
    const PoincareContext pc(theta);
    for (int l : degrees(c, 0, n)) {
      const auto b = homotopy_defect_batch(pc, l, c.forms, c.degree, salt(c, n, l), Execution::parallel);
      r.add(tag(n, l) + "/homotopy", "dR + Rd - 1 is the zero polynomial (count of nonzero defects)",
            {{"theta", theta_json(theta)}, {"l", l}, {"forms", c.forms}, {"degree", c.degree}, {"seed", salt(c, n, l)}},
            b.nonzero, 0.0, {{"forms", b.forms}, {"max_degree_seen", b.max_degree_seen}});
    }
    // the moment-averaged route to R must give the same polynomials
    if (n > 3) continue;
    for (int l : degrees(c, 1, n)) {
      std::mt19937_64 rng(salt(c, n, l, 5));
      int mismatches = 0, count = 5;
      std::string first;
      for (int i = 0; i < count; ++i) {
        const PolyForm u = random_polyform(n, l, std::min(c.degree, 3), rng);
        const PolyForm a = widen(poincare_R(pc, u), n), b = widen(poincare_R_averaged(pc, u), n);
        if (!(a == b) && mismatches++ == 0) first = to_string(u);
      }
      r.add(tag(n, l) + "/routes", "closed-form R equals the moment-averaged R_a (count of mismatches)",
            {{"theta", theta_json(theta)}, {"l", l}, {"seed", salt(c, n, l, 5)}}, mismatches, 0.0,
            {{"forms", count}, {"first_mismatch", first}});
    }
  }
}

void suite_qspace(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {3})) {
    const ThetaBump theta = shifted_theta(c, n);
    const PoincareContext pc(theta);
    for (int p = 1; p <= 3; ++p) {
      const auto complex = q_complex(n, p);
      for (int l : degrees(c, 1, n)) {
        const auto q = check_qspace_preservation(pc, complex, l);
        const double bad = (q.checked - q.preserved) + !q.koszul_closed + !q.affine_invariant;
        json fails = json::array();
        for (std::size_t i = 0; i < std::min<std::size_t>(q.failures.size(), 5); ++i) fails.push_back(q.failures[i]);
        r.add(tag(n, l) + "/p" + std::to_string(p), "R maps every spanning monomial of the Q-space into the next",
              {{"theta", theta_json(theta)}, {"l", l}, {"p", p}}, bad, 0.0,
              {{"checked", q.checked},
               {"preserved", q.preserved},
               {"koszul_closed", q.koszul_closed},
               {"affine_invariant", q.affine_invariant},
               {"failures", fails}});
      }
    }
  }
}

void suite_closed_forms(const RunConfig& c, Report& r) {
  const ThetaBump theta = centered_tensor_bump(2, 1, 1);
  const PoincareContext pc(theta);
  const json in = {{"theta", theta_json(theta)}};

  const PolyForm u1 = monomial_form(2, std::vector<int>{1}, std::vector<int>{1, 0}, 1);
  const PolyForm e1 = scalar_form(2, RationalPoly::monomial(2, std::vector<int>{2, 0}, Rational(1, 2)) +
                                         RationalPoly::constant(2, Rational(-1, 10)));
  const PolyForm u2 = monomial_form(2, std::vector<int>{1, 2}, std::vector<int>{0, 0}, 1);
  const PolyForm e2 = monomial_form(2, std::vector<int>{2}, std::vector<int>{1, 0}, Rational(1, 2)) +
                      monomial_form(2, std::vector<int>{1}, std::vector<int>{0, 1}, Rational(-1, 2));

  struct Case {
    const char* id;
    const char* what;
    PolyForm u, expected;
  };
  const Case cases[] = {{"R1-x1dx1", "R_1(x1 dx1) = x1^2/2 - 1/10", u1, e1},
                        {"R2-dx1dx2", "R_2(dx1^dx2) = (x1 dx2 - x2 dx1)/2", u2, e2}};
  const BogovskiiContext bc = bogovskii_context(c, theta);
  const auto pts = kronecker_points(cube(2, -1.5, 1.5), 9);
  for (const auto& k : cases) {
    const PolyForm got = widen(poincare_R(pc, k.u), 2);
    const PolyForm avg = widen(poincare_R_averaged(pc, k.u), 2);
    json in_k = in;
    in_k["u"] = to_json(k.u);
    r.add(std::string(k.id) + "/exact", k.what, in_k, got == k.expected ? 0.0 : 1.0, 0.0,
          {{"got", to_string(got)}, {"expected", to_string(k.expected)}});
    r.add(std::string(k.id) + "/averaged", std::string(k.what) + " via the moment-averaged route", in_k,
          avg == k.expected ? 0.0 : 1.0, 0.0, {{"got", to_string(avg)}});
    // numeric R against the closed form
    const CompiledPolyForm cu(k.u), ce(k.expected);
    const SampledForm su(2, k.u.degree(), [cu](auto x, auto o) { cu.eval(x, o); }, {});
    double err = 0.0, scale = 0.0;
    for (const auto& x : pts) {
      const auto num = poincare_R_numeric(bc, su, x);
      std::vector<double> ex(num.size());
      ce.eval(x, ex);
      for (std::size_t i = 0; i < ex.size(); ++i) err = std::max(err, std::abs(num[i] - ex[i]));
      scale = std::max(scale, sup_abs(ex));
    }
    r.add(std::string(k.id) + "/numeric", std::string(k.what) + ", numeric R at sample points (relative)", in_k,
          err / scale, c.tol.R_exact, {{"points", pts.size()}, {"max_abs_error", err}});
  }
}

void suite_bogovskii(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {2, 3})) {
    const ThetaBump theta = shifted_theta(c, n);
    const BogovskiiContext bc = bogovskii_context(c, theta);
    const PoincareContext pc(theta);
    const auto pts = kronecker_points(cube(n, -0.6, 1.2), c.points);
    const std::vector<std::vector<double>> few(pts.begin(), pts.begin() + std::min<std::size_t>(pts.size(), 8));
    const std::vector<double> centre(static_cast<std::size_t>(n), 0.6);
    for (int l : degrees(c, 0, n)) {
      std::mt19937_64 rng(salt(c, n, l));
      const SampledForm u = bump_fixture(n, l, centre, 0.5, 3, rng);
      const json in = {{"theta", theta_json(theta)}, {"l", l}, {"seed", salt(c, n, l)}, {"points", pts.size()}};
      std::string what = "dT u + T du - u at sample points";
      if (l == 0) what = "T_1 du - u at sample points";
      if (l == n) what = "dT_n u - u + (int u) *theta at sample points";
      const auto t = homotopy_check_T(bc, u, pts);
      r.add(tag(n, l) + "/T-homotopy", what, in, t.max_residual, c.tol.T_homotopy,
            {{"points", t.points.size()}, {"u_sup", t.u_sup}});
      r.tables.push_back(residual_table("T_" + tag(n, l).replace(2, 1, "_"), n, t.points));

      const auto h = homotopy_check_R(bc, u, few);
      r.add(tag(n, l) + "/R-homotopy", "dR u + R du - u (numeric R) at sample points", in, h.max_residual,
            c.tol.R_homotopy, {{"points", h.points.size()}, {"u_sup", h.u_sup}});

      if (l == 0) continue;
      const PolyForm p = random_polyform(n, l, 3, rng);
      const CompiledPolyForm cp(p), cR(widen(poincare_R(pc, p), n));
      const SampledForm sp(n, l, [cp](auto x, auto o) { cp.eval(x, o); }, {});
      double err = 0.0, scale = 0.0;
      const auto ex_pts = kronecker_points(cube(n, -1.0, 1.5), 5);
      for (const auto& x : ex_pts) {
        const auto num = poincare_R_numeric(bc, sp, x);
        std::vector<double> ex(num.size());
        cR.eval(x, ex);
        for (std::size_t i = 0; i < ex.size(); ++i) err = std::max(err, std::abs(num[i] - ex[i]));
        scale = std::max(scale, sup_abs(ex));
      }
      r.add(tag(n, l) + "/R-exact", "numeric R against exact R on a polynomial form (relative)",
            {{"theta", theta_json(theta)}, {"u", to_json(p)}}, scale > 0 ? err / scale : err, c.tol.R_exact,
            {{"points", ex_pts.size()}, {"max_abs_error", err}});
    }
  }
}

void suite_support(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {2, 3})) {
    const ThetaBump theta = shifted_theta(c, n);
    const BogovskiiContext bc = bogovskii_context(c, theta);
    const auto pts = kronecker_points(cube(n, -0.8, 2.4), std::max(4 * c.points, 100));
    const std::vector<double> centre(static_cast<std::size_t>(n), 1.2);
    for (int l : degrees(c, 1, n)) {
      std::mt19937_64 rng(salt(c, n, l));
      const SampledForm u = bump_fixture(n, l, centre, 0.4, 3, rng);
      const auto s = support_check_T(bc, u, pts);
      // too few points outside the hull proves nothing
      const double res = s.outside < 10 ? INFINITY : s.max_outside / s.u_sup;
      r.add(tag(n, l) + "/T-hull", "|T u| / sup|u| outside the starlike hull of supp u",
            {{"theta", theta_json(theta)}, {"l", l}, {"seed", salt(c, n, l)}}, res, c.tol.support,
            {{"outside", s.outside}, {"sampled", pts.size()}, {"max_outside", s.max_outside}, {"u_sup", s.u_sup}});
    }
    if (n != 2) continue;
    const CoverContext cov = l_domain_cover();
    for (int l : degrees(c, 1, 2)) {
      std::mt19937_64 rng(salt(c, 2, l, 7));
      const SampledForm u = bump_fixture(2, l, {0.55, 0.95}, 0.44, 4, rng);
      const auto t = composite_T_support(cov, u, exterior_points(cov, 40));
      r.add("L/" + tag(2, l) + "/composite-T", "|T u| / sup|u| outside the closed domain (composite T)",
            {{"cover", cov.name}, {"l", l}, {"seed", salt(c, 2, l, 7)}}, t.max_value / t.u_sup, c.tol.support,
            {{"points", t.points}, {"max_value", t.max_value}, {"u_sup", t.u_sup}});
      const SampledForm v = bump_fixture(2, l, {1.6, 1.6}, 0.5, 4, rng);
      const auto loc = composite_R_locality(cov, v, interior_points(cov, 40));
      r.add("L/" + tag(2, l) + "/composite-R", "|R u| on the domain for u vanishing there (composite R)",
            {{"cover", cov.name}, {"l", l}, {"seed", salt(c, 2, l, 7)}}, loc.max_value, c.tol.support,
            {{"points", loc.points}, {"u_sup", loc.u_sup}});
    }
  }
}

void suite_duality(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {2})) {
    const ThetaBump theta = theta_for(c, n, make_tensor_bump(n, fill(n, Rational(0)), Rational(1, 2), 2));
    const BogovskiiContext bc = bogovskii_context(c, theta);
    for (int t = 0; t < c.pairs; ++t) {
      const int l = t % n;
      if (c.l && *c.l != l) continue;
      const double a = 0.9 * (t / n);
      std::vector<double> cu(static_cast<std::size_t>(n), 0.0), cv(static_cast<std::size_t>(n), 0.0);
      cu[0] = 0.3 * std::cos(a);
      cu[1] = 0.3 * std::sin(a);
      cv[0] = 0.4 * std::cos(a + 2);
      cv[1] = 0.4 * std::sin(a + 2);
      std::mt19937_64 rng(salt(c, n, l, t));
      const SampledForm u = profile_form(radial_bump_field(cu, 0.7, 3), random_polyform(n, l, 2, rng));
      const SampledForm v = profile_form(radial_bump_field(cv, 0.8, 3), random_polyform(n, l + 1, 2, rng));
      const auto res = adjoint_check(bc, u, v);
      char id[32];
      std::snprintf(id, sizeof id, "%s/pair%02d", tag(n, l).c_str(), t);
      r.add(id, "|(v, Q u) - (T v, u)| relative", {{"theta", theta_json(theta)}, {"l", l}, {"seed", salt(c, n, l, t)}},
            res.relative_defect(), c.tol.adjoint, {{"lhs", res.lhs}, {"rhs", res.rhs}});
    }
  }
}

void suite_kernel(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {2, 3})) {
    const ThetaBump theta = shifted_theta(c, n);
    const auto pts = kronecker_points(cube(n, -1.0, 1.5), 6);
    for (int l : degrees(c, 1, n)) {
      const auto a = kernel_agreement(theta, l, c.kernel_pairs, salt(c, n, l));
      r.add(tag(n, l) + "/homogeneous-sum", "defining integral against the homogeneous sum (max relative)",
            {{"theta", theta_json(theta)}, {"l", l}, {"pairs", c.kernel_pairs}, {"seed", salt(c, n, l)}},
            a.max_relative, c.tol.kernel, {{"pairs", a.pairs}, {"nonzero", a.nonzero}});
      const auto w = weak_singularity_scan(theta, l, pts, 3.0);
      r.add(tag(n, l) + "/weak-singularity", "fitted constant of |G (x-y)| |x-y|^{n-1}, change under refinement",
            {{"theta", theta_json(theta)}, {"l", l}, {"rho_max", w.rho_max}}, w.max_change, c.tol.weak_singularity,
            {{"sup_constant", w.sup_constant},
             {"directions", w.directions},
             {"radii", w.radii},
             {"constants", w.constant},
             {"limits", w.limit}});
      Table t;
      t.name = "weak_" + tag(n, l).replace(2, 1, "_");
      for (int i = 1; i <= n; ++i) t.columns.push_back("x" + std::to_string(i));
      t.columns.insert(t.columns.end(), {"constant", "constant_refined", "limit"});
      for (std::size_t i = 0; i < w.points.size(); ++i) {
        auto row = w.points[i];
        row.insert(row.end(), {w.constant[i], w.constant_refined[i], w.limit[i]});
        t.rows.push_back(std::move(row));
      }
      r.tables.push_back(std::move(t));
    }
  }
}

void suite_symbol(const RunConfig& c, Report& r) {
  for (int n : dims_or(c, {2})) {
    const ThetaBump theta = theta_for(c, n, centered_tensor_bump(n, 1, 4));
    ScanGrid grid = ScanGrid::standard(n);
    grid.directions = c.symbol.directions;
    grid.xi_max = c.symbol.xi_max;
    grid.per_decade = c.symbol.per_decade;
    grid.plateau_from = c.symbol.plateau_from;
    grid.plateau_tol = c.tol.plateau;
    for (int l : degrees(c, 1, std::min(n, 2))) {
      for (int j = 1; j <= n; ++j) {
        SymbolProbe p(theta, l, j);
        p.tau_max = c.symbol.tau_max;
        p.panel_points = c.symbol.panel_points;
        const auto d = decay_scan(p, grid);
        const std::string id = tag(n, l) + "/j" + std::to_string(j);
        const json in = {{"theta", theta_json(theta)}, {"l", l},           {"j", j},
                         {"xi_max", grid.xi_max},      {"rays", grid.directions}};
        r.add(id + "/E0-plateau", "growth of sup |k1^| (1+|xi|) over the last decade", in, d.growth0, c.tol.plateau,
              {{"E0", d.E0_run.back()}, {"box_constant", d.box_constant}, {"box_ratio", d.box_ratio}});
        r.add(id + "/E1-plateau", "growth of sup |D_xi k1^| (1+|xi|)^2 over the last decade", in, d.growth1,
              c.tol.plateau, {{"E1", d.E1_run.back()}});
        r.add(id + "/Ex-plateau", "growth of sup |D_x k1^| (1+|xi|) over the last decade", in, d.growthx,
              c.tol.plateau, {{"Ex", d.Ex_run.back()}});
        r.add(id + "/xi-zero", "k1^(x, 0) against -x_j (2^l - 1)/l", in, d.zero_error, c.tol.symbol_zero);
        Table t;
        t.name = "curve_" + tag(n, l).replace(2, 1, "_") + "_j" + std::to_string(j);
        t.columns = {"xi", "E0", "E1", "Ex", "E0_run", "E1_run", "Ex_run"};
        for (std::size_t i = 0; i < d.xi.size(); ++i)
          t.rows.push_back({d.xi[i], d.E0[i], d.E1[i], d.Ex[i], d.E0_run[i], d.E1_run[i], d.Ex_run[i]});
        r.tables.push_back(std::move(t));
      }
      if (!c.symbol.consistency || n != 2) continue;
      const ThetaBump u = make_tensor_bump(2, std::vector<Rational>{Rational(3, 10), Rational(-1, 5)}, Rational(3, 5), 4);
      const std::vector<std::vector<double>> pts{{0.3, -0.2}, {0.5, 0.1}, {0.0, -0.4}, {0.6, -0.5}, {0.1, 0.2}};
      const auto rep = operator_consistency(SymbolProbe(theta, l, 1), u, pts);
      r.add(tag(n, l) + "/consistency", "Ku by kernel quadrature against k0 + Fourier synthesis of k1^",
            {{"theta", theta_json(theta)}, {"u", u.to_json()}, {"l", l}}, rep.max_relative, c.tol.consistency,
            {{"xi_cutoff", rep.xi_cutoff}, {"points", rep.points.size()}});
    }
  }
}

void suite_glue(const RunConfig& c, Report& r) {
  const CoverContext cov = cover_by_name(c.cover);
  const int n = cov.dimension();
  const auto g = check_cover_geometry(cov);
  r.add(cov.name + "/geometry", "starlike pieces, covering, partition sum and supports",
        {{"cover", to_json(cov)}},
        g.starlike_violations + g.uncovered + g.support_violations + (g.partition_defect > 1e-12 ? 1.0 : 0.0), 0.0,
        {{"starlike_segments", g.starlike_segments},
         {"cover_samples", g.cover_samples},
         {"partition_defect", g.partition_defect}});

  // fixture inside the domain
  std::vector<double> centre;
  double radius = 0.0;
  if (cov.name == "L") {
    centre = {0.55, 0.95};
    radius = 0.44;
  } else if (cov.name == "U") {
    centre = {1.0, 0.6};
    radius = 0.4;
  } else {
    centre = cov.pieces.front().base.center;
    radius = 2.0 * cov.pieces.front().base.radius;
  }
  const auto pts = interior_points(cov, c.points);
  for (int l : degrees(c, 0, n)) {
    std::mt19937_64 rng(salt(c, n, l));
    const SampledForm u = bump_fixture(n, l, centre, radius, 4, rng);
    const json in = {{"cover", cov.name}, {"l", l}, {"seed", salt(c, n, l)}, {"points", pts.size()}};
    const auto gr = glue_homotopy_R(cov, u, pts);
    r.add(cov.name + "/" + tag(n, l) + "/R", "dR u + R du + K u - u (composite R)", in, gr.max_residual, c.tol.glue,
          {{"reference", gr.reference}, {"margin", cov.margin}});
    const auto gt = glue_homotopy_T(cov, u, pts);
    r.add(cov.name + "/" + tag(n, l) + "/T", "dT u + T du + L u - u (composite T)", in, gt.max_residual, c.tol.glue,
          {{"reference", gt.reference}, {"margin", cov.margin}});
    const auto cm = commutation_check(cov, u, pts);
    r.add(cov.name + "/" + tag(n, l) + "/dK", "dK u - K du", in, cm.K.max_residual, c.tol.commutation,
          {{"reference", cm.K.reference}});
    r.add(cov.name + "/" + tag(n, l) + "/dL", "dL u - L du", in, cm.L.max_residual, c.tol.commutation,
          {{"reference", cm.L.reference}});
  }
  const CoverContext flat = flat_cover(Box{{-1, -1}, {2, 2}}, Ball{{0.5, 0.5}, 0.4});
  const auto fpts = kronecker_points(Box{{-0.5, -0.5}, {1.5, 1.5}}, 10);
  for (int l : degrees(c, 0, 2)) {
    std::mt19937_64 rng(salt(c, 2, l, 3));
    const SampledForm u = bump_fixture(2, l, {0.6, 0.4}, 0.6, 4, rng);
    const auto d = degeneration_check(flat, u, fpts);
    r.add("flat/" + tag(2, l) + "/degeneration", "one-piece flat cover against the single-theta operators",
          {{"cover", to_json(flat)}, {"l", l}, {"seed", salt(c, 2, l, 3)}}, d.max(), c.tol.degeneration,
          {{"R", d.R}, {"T", d.T}, {"K", d.K}, {"L", d.L}});
  }
}

}  // namespace

Report run_suite(const std::string& suite, const RunConfig& cfg) {
  Report r;
  r.suite = suite;
  r.seed = cfg.seed;
  r.config = cfg.to_json();
  r.config["suite"] = suite;
  r.config.erase("out");
  r.config.erase("format");
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (suite == "algebra") suite_algebra(cfg, r);
    else if (suite == "poincare") suite_poincare(cfg, r);
    else if (suite == "qspace") suite_qspace(cfg, r);
    else if (suite == "closed-forms") suite_closed_forms(cfg, r);
    else if (suite == "bogovskii") suite_bogovskii(cfg, r);
    else if (suite == "support") suite_support(cfg, r);
    else if (suite == "duality") suite_duality(cfg, r);
    else if (suite == "kernel") suite_kernel(cfg, r);
    else if (suite == "symbol") suite_symbol(cfg, r);
    else if (suite == "glue") suite_glue(cfg, r);
    else throw ConfigError("unknown suite '" + suite + "'");
  } catch (const ContractViolation& e) {
    throw ConfigError("suite " + suite + ": " + e.what());
  }
  r.finalize();
  r.environment = environment_fingerprint(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return r;
}

std::vector<Report> run_suites(const RunConfig& cfg) {
  if (cfg.suite != "all") return {run_suite(cfg.suite, cfg)};
  std::vector<Report> out;
  for (const auto& s : suite_names()) out.push_back(run_suite(s, cfg));
  return out;
}

}  // namespace derham
