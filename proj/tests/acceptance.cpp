// Acceptance run: one line per criterion. Each criterion runs a verification
// suite with an explicit config; it passes when every check passes, no check
// was held to a looser tolerance than the pinned one, the required cases are
// all present, and the run fits its time budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "derham/suites.hpp"

using namespace derham;
using nlohmann::json;

namespace {

struct Rule {
  std::string pattern;  // regex over check ids
  double pinned;        // largest tolerance a matching check may carry
  int min_count;        // matching checks that must be present
};

struct Criterion {
  int number;
  std::string title;
  std::string suite;
  json config;
  std::vector<Rule> rules;
  double budget_seconds;
  std::function<std::string(const Report&)> extra;  // empty string = ok
};

std::string evaluate(const Criterion& c, const Report& r) {
  std::vector<int> seen(c.rules.size(), 0);
  for (const auto& rec : r.checks) {
    bool matched = false;
    for (std::size_t i = 0; i < c.rules.size(); ++i) {
      if (!std::regex_match(rec.id, std::regex(c.rules[i].pattern))) continue;
      matched = true;
      ++seen[i];
      if (rec.tolerance > c.rules[i].pinned) return rec.id + " tolerance " + std::to_string(rec.tolerance) + " looser than pinned";
    }
    if (!matched) return rec.id + " not covered by any pinned rule";
    if (!rec.pass) return rec.id + " failed (residual " + std::to_string(rec.residual) + ")";
  }
  for (std::size_t i = 0; i < c.rules.size(); ++i)
    if (seen[i] < c.rules[i].min_count)
      return "only " + std::to_string(seen[i]) + " checks match " + c.rules[i].pattern;
  return c.extra ? c.extra(r) : std::string();
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> out;
  out.push_back({1, "exact homotopy identity dR + Rd = 1, n 2..4, 100 forms of degree <= 4 per (n, l)", "poincare",
                 {{"dims", {2, 3, 4}}, {"forms", 100}, {"degree", 4}, {"seed", 7}},
                 {{R"(n[234]/l\d/homotopy)", 0.0, 3 + 4 + 5}, {R"(n[23]/l\d/routes)", 0.0, 2 + 3}},
                 60.0,
                 [](const Report& r) -> std::string {
                   for (const auto& c : r.checks)
                     if (c.id.ends_with("/homotopy") &&
                         (c.details.at("forms") != 100 || c.details.at("max_degree_seen").get<int>() > 4))
                       return c.id + ": wrong form count or degree";
                   return {};
                 }});
  out.push_back({2, "exterior-algebra identities, exhaustive over blades for n <= 4", "algebra",
                 {{"dims", {1, 2, 3, 4}}, {"seed", 7}},
                 {{R"(n[1234]/[a-z-]+)", 0.0, 4 * 7}},
                 5.0, nullptr});
  out.push_back({3, "R maps the Q-space spanning monomials into polynomials, n = 3, p = 1..3", "qspace",
                 {{"dims", {3}}, {"seed", 7}},
                 {{R"(n3/l[123]/p[123])", 0.0, 9}},
                 30.0, nullptr});
  out.push_back({4, "worked closed forms R1(x1 dx1) and R2(dx1^dx2) on the centred k = 1 bump", "closed-forms",
                 {{"seed", 7}},
                 {{R"(R[12]-[a-z0-9]+/(exact|averaged))", 0.0, 4}, {R"(R[12]-[a-z0-9]+/numeric)", 1e-5, 2}},
                 30.0, nullptr});
  out.push_back({5, "Bogovskii homotopy dT + Td = 1 with endpoint identities, n = 2, 3, >= 25 points", "bogovskii",
                 {{"dims", {2, 3}}, {"points", 25}, {"seed", 7}},
                 {{R"(n[23]/l\d/T-homotopy)", 5e-4, 3 + 4},
                  {R"(n[23]/l\d/R-homotopy)", 5e-4, 3 + 4},
                  {R"(n[23]/l\d/R-exact)", 1e-5, 2 + 3}},
                 600.0,
                 [](const Report& r) -> std::string {
                   for (const auto& c : r.checks)
                     if (c.id.ends_with("/T-homotopy") && c.details.at("points").get<int>() < 25)
                       return c.id + ": fewer than 25 sample points";
                   return {};
                 }});
  out.push_back({6, "support: starlike hull, composite T inside the closed L-domain, composite R locality", "support",
                 {{"dims", {2, 3}}, {"points", 25}, {"seed", 7}, {"cover", "L"}},
                 {{R"(n[23]/l\d/T-hull)", 1e-9, 2 + 3},
                  {R"(L/n2/l\d/composite-T)", 1e-9, 2},
                  {R"(L/n2/l\d/composite-R)", 1e-9, 2}},
                 300.0, nullptr});
  out.push_back({7, "duality (v, Q u) = (T v, u), n = 2, >= 10 pairs", "duality",
                 {{"dims", {2}}, {"pairs", 10}, {"seed", 7}},
                 {{R"(n2/l\d/pair\d\d)", 1e-5, 10}},
                 600.0, nullptr});
  out.push_back({8, "symbol decay plateaus to |xi| = 1000 on 8 rays and the xi = 0 value, n = 2, l = 1, 2", "symbol",
                 {{"dims", {2}}, {"seed", 7}, {"symbol", {{"xi_max", 1000}, {"directions", 8}}}},
                 {{R"(n2/l[12]/j[12]/E[01x]-plateau)", 0.01, 12}, {R"(n2/l[12]/j[12]/xi-zero)", 1e-10, 4}},
                 300.0, nullptr});
  out.push_back({9, "kernel: defining integral vs homogeneous sum at 50 pairs, weak-singularity constant stable",
                 "kernel",
                 {{"dims", {2, 3}}, {"kernel_pairs", 50}, {"seed", 7}},
                 {{R"(n[23]/l\d/homogeneous-sum)", 1e-8, 2 + 3}, {R"(n[23]/l\d/weak-singularity)", 0.02, 2 + 3}},
                 300.0, nullptr});
  out.push_back({10, "glued homotopies on the L-domain, commutation, flat-cover degeneration", "glue",
                 {{"seed", 7}, {"cover", "L"}},
                 {{R"(L/geometry)", 0.0, 1},
                  {R"(L/n2/l\d/[RT])", 1e-4, 2 * 3},
                  {R"(L/n2/l\d/d[KL])", 1e-3, 2},
                  {R"(flat/n2/l\d/degeneration)", 1e-10, 3}},
                 300.0, nullptr});
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string why;
    Report r;
    try {
      r = run_suite(c.suite, config_from_json(c.config));
      why = evaluate(c, r);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && secs > c.budget_seconds) why = "over time budget of " + std::to_string(c.budget_seconds) + " s";
    const bool ok = why.empty();
    if (!ok) ++failed;
    std::printf("criterion %2d %s  %s  [%zu checks, max residual %.3g, %.1f s]%s%s\n", c.number, ok ? "PASS" : "FAIL",
                c.title.c_str(), r.checks.size(), r.checks.empty() ? 0.0 : r.max_residual(), secs, ok ? "" : "  ",
                why.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
