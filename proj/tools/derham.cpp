// derham: batch driver for the verification suites.
//
//   derham verify <suite> [--n N] [--l L] [--degree D] [--seed S] [--config file] [--out dir] [--format f]
//   derham poincare apply --form u.json
//   derham bogovskii eval --n 2 --l 1
//   ...
// Exit status: 0 all checks pass, 1 some check fails, 2 configuration error.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "derham/errors.hpp"
#include "derham/parallel.hpp"
#include "derham/poincare.hpp"
#include "derham/profiles.hpp"
#include "derham/report.hpp"
#include "derham/suites.hpp"

using namespace derham;
using nlohmann::json;

namespace {

struct Flags {
  std::string suite;
  std::optional<int> n, l, degree;
  std::optional<std::uint64_t> seed;
  std::string config, out, format;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--n", f.n, "dimension")->check(CLI::Range(1, 6));
  app->add_option("--l", f.l, "form degree")->check(CLI::Range(0, 6));
  app->add_option("--degree", f.degree, "max polynomial degree of random forms");
  app->add_option("--seed", f.seed, "seed for random fixtures");
  app->add_option("--config", f.config, "JSON run configuration");
  app->add_option("--out", f.out, "directory for report files");
  app->add_option("--format", f.format, "json, csv or markdown");
}

// config file first, flags on top; the merged object is what gets validated
RunConfig merged_config(const Flags& f, const std::string& suite) {
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file " + f.config);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config " + f.config + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config " + f.config + " is not a JSON object");
  }
  if (!suite.empty()) j["suite"] = suite;
  if (f.n) {
    j.erase("dims");
    j["n"] = *f.n;
  }
  if (f.l) j["l"] = *f.l;
  if (f.degree) j["degree"] = *f.degree;
  if (f.seed) j["seed"] = *f.seed;
  if (!f.out.empty()) j["out"] = f.out;
  if (!f.format.empty()) j["format"] = f.format;
  return config_from_json(j);
}

int finish(std::vector<Report> reports, const RunConfig& cfg, bool write, const std::vector<std::string>& keep = {}) {
  if (!keep.empty()) {
    for (auto& r : reports) {
      std::erase_if(r.checks, [&](const CheckRecord& c) {
        for (const auto& k : keep)
          if (c.id.find(k) != std::string::npos) return false;
        return true;
      });
    }
  }
  bool ok = true;
  for (const auto& r : reports) {
    for (const auto& c : r.checks)
      std::printf("%s  %-12s %-34s residual %.3e  tol %.1e\n", c.pass ? "pass" : "FAIL", r.suite.c_str(), c.id.c_str(),
                  c.residual, c.tolerance);
    ok = ok && r.all_pass();
  }
  if (write) {
    for (const auto& p : write_reports(reports, cfg.format, cfg.out)) std::fprintf(stderr, "wrote %s\n", p.c_str());
  }
  std::printf("%s\n", ok ? "all checks pass" : "some checks FAILED");
  return ok ? 0 : 1;
}

int run(const Flags& f, const std::string& suite, const std::vector<std::string>& keep = {}) {
  const RunConfig cfg = merged_config(f, suite);
  return finish(run_suites(cfg), cfg, !f.out.empty(), keep);
}

int poincare_apply(const Flags& f, const std::string& form_path) {
  const RunConfig cfg = merged_config(f, "poincare");
  std::ifstream in(form_path);
  if (!in) throw ConfigError("cannot read form file " + form_path);
  PolyForm u;
  try {
    u = polyform_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("form " + form_path + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError("form " + form_path + ": " + e.what());
  }
  const int n = u.dimension();
  json tj = cfg.theta ? *cfg.theta : json{{"kind", "tensor"}, {"r", 1}, {"k", 1}};
  tj["n"] = n;
  const PoincareContext pc(bump_from_json(tj));
  json out;
  out["u"] = to_json(u);
  out["theta"] = pc.theta.to_json();
  if (u.degree() == 0) {
    out["R"] = {{"constant", extended_R0(pc, u).get_str()}};
  } else {
    out["R"] = to_json(widen(poincare_R(pc, u), n));
  }
  const PolyForm defect = homotopy_defect_R(pc, u);
  out["homotopy_defect_zero"] = defect.terms().empty();
  const std::string text = canonical_json(out) + "\n";
  if (f.out.empty()) {
    std::cout << text;
  } else {
    std::filesystem::create_directories(f.out);
    std::ofstream(std::filesystem::path(f.out) / "poincare_apply.json") << text;
  }
  return defect.terms().empty() ? 0 : 1;
}

// T u of the homotopy fixture at deterministic points, one CSV row per point
int bogovskii_eval(const Flags& f, int points) {
  const RunConfig cfg = merged_config(f, "bogovskii");
  const int n = cfg.dims.empty() ? 2 : cfg.dims.front();
  const int l = cfg.l.value_or(1);
  if (l < 1 || l > n) throw ConfigError("bogovskii eval needs 1 <= l <= n");
  json tj = cfg.theta ? *cfg.theta : json{{"kind", "tensor"}, {"center", std::vector<std::string>(n, "1/4")}, {"r", "1/2"}, {"k", 2}};
  tj["n"] = n;
  BogovskiiContext ctx(bump_from_json(tj));
  ctx.cubature = cfg.cubature;
  ctx.line_points = cfg.line_points;
  std::mt19937_64 rng(cfg.seed);
  const SampledForm u = profile_form(radial_bump_field(std::vector<double>(n, 0.6), 0.5, 3), random_polyform(n, l, 2, rng));
  const auto pts = kronecker_points(Box{std::vector<double>(n, -0.6), std::vector<double>(n, 1.2)}, points);
  const auto vals = bogovskii_T_batch(ctx, u, pts, Execution::parallel);
  Table t;
  t.name = "bogovskii_eval";
  for (int i = 1; i <= n; ++i) t.columns.push_back("x" + std::to_string(i));
  for (const auto& b : blades_of_degree(n, l - 1)) t.columns.push_back("T_" + b.to_string());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto row = pts[i];
    row.insert(row.end(), vals[i].begin(), vals[i].end());
    t.rows.push_back(std::move(row));
  }
  const std::string csv = table_csv(t);
  if (f.out.empty()) {
    std::cout << csv;
  } else {
    std::filesystem::create_directories(f.out);
    std::ofstream(std::filesystem::path(f.out) / "bogovskii_eval.csv") << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  omp_set_num_threads(thread_cap());
  CLI::App app{"derham: regularized Poincare and Bogovskii operators, verification driver"};
  app.require_subcommand(1);
  Flags f;
  int status = 0;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string verify_suite;
  verify->add_option("suite_id", verify_suite, "suite id or 'all'");
  verify->add_option("--suite", f.suite, "suite id or 'all'");
  add_common(verify, f);

  auto* poincare = app.add_subcommand("poincare", "exact regularized Poincare operator");
  poincare->require_subcommand(1);
  auto* p_apply = poincare->add_subcommand("apply", "R applied to a PolyForm JSON file");
  std::string form_path;
  p_apply->add_option("--form", form_path, "PolyForm JSON")->required();
  auto* p_homotopy = poincare->add_subcommand("homotopy-check", "exact dR + Rd = 1 on random forms");
  auto* p_qspace = poincare->add_subcommand("qspace-check", "R maps Q-spaces into Q-spaces");

  auto* bog = app.add_subcommand("bogovskii", "numeric Bogovskii operator");
  bog->require_subcommand(1);
  auto* b_eval = bog->add_subcommand("eval", "T u of the standard fixture at sample points (CSV)");
  int eval_points = 25;
  b_eval->add_option("--points", eval_points, "number of sample points");
  auto* b_homotopy = bog->add_subcommand("homotopy-check", "dT + Td = 1 at sample points");
  auto* b_adjoint = bog->add_subcommand("adjoint-check", "(v, Q u) = (T v, u) on fixture pairs");

  auto* kernel = app.add_subcommand("kernel", "kernel of T");
  kernel->require_subcommand(1);
  auto* k_scan = kernel->add_subcommand("g-scan", "kernel forms agree; weak-singularity constant");

  auto* symbol = app.add_subcommand("symbol", "symbol of the singular part");
  symbol->require_subcommand(1);
  auto* s_scan = symbol->add_subcommand("scan", "decay of k1^ and its derivatives");

  auto* glue = app.add_subcommand("glue", "operators glued over a cover");
  glue->require_subcommand(1);
  auto* g_homotopy = glue->add_subcommand("homotopy-check", "glued homotopy relations with remainders");
  auto* g_support = glue->add_subcommand("support-check", "support of composite T, locality of composite R");
  auto* g_commute = glue->add_subcommand("commutation-check", "dK = Kd and dL = Ld");

  for (auto* s : {p_apply, p_homotopy, p_qspace, b_eval, b_homotopy, b_adjoint, k_scan, s_scan, g_homotopy, g_support,
                  g_commute})
    add_common(s, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) {
      std::string s = !verify_suite.empty() ? verify_suite : f.suite;
      status = run(f, s);
    } else if (*p_apply) {
      status = poincare_apply(f, form_path);
    } else if (*p_homotopy) {
      status = run(f, "poincare", {"/homotopy"});
    } else if (*p_qspace) {
      status = run(f, "qspace");
    } else if (*b_eval) {
      status = bogovskii_eval(f, eval_points);
    } else if (*b_homotopy) {
      status = run(f, "bogovskii");
    } else if (*b_adjoint) {
      status = run(f, "duality");
    } else if (*k_scan) {
      status = run(f, "kernel");
    } else if (*s_scan) {
      status = run(f, "symbol");
    } else if (*g_homotopy) {
      status = run(f, "glue", {"/R", "/T", "/geometry", "/degeneration"});
    } else if (*g_support) {
      Flags g = f;
      if (!g.n) g.n = 2;
      status = run(g, "support", {"L/"});
    } else if (*g_commute) {
      status = run(f, "glue", {"/dK", "/dL"});
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return status;
}
