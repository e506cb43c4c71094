#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "derham/errors.hpp"
#include "derham/parallel.hpp"
#include "derham/report.hpp"
#include "derham/schema.hpp"
#include "derham/suites.hpp"

using namespace derham;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Report sample_report() {
  Report r;
  r.suite = "demo";
  r.seed = 3;
  r.add("b/second", "second", json{{"x", 1}}, 2e-3, 1e-3);
  r.add("a/first", "first", json{{"x", 2}}, 1e-9, 1e-6);
  r.add("c/nan", "nan residual", json::object(), std::numeric_limits<double>::quiet_NaN(), 1.0);
  r.tables.push_back(Table{"curve", {"xi", "value"}, {{1.0, 0.5}, {10.0, 0.05}}});
  r.finalize();
  return r;
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("fnv1a and canonical numbers") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(canonical_json(json(0.1), -1) == "0.10000000000000001");
    CHECK(canonical_json(json(std::numeric_limits<double>::quiet_NaN()), -1) == "null");
    CHECK(canonical_json(json(std::numeric_limits<double>::infinity()), -1) == "null");
    CHECK(canonical_json(json{{"b", 1}, {"a", 2}}, -1) == R"({"a":2,"b":1})");
    CHECK(inputs_digest(json{{"b", 1}, {"a", 2}}) == inputs_digest(json{{"a", 2}, {"b", 1}}));
  }

  TEST_CASE("report verdicts, ordering and formats") {
    const Report r = sample_report();
    CHECK(r.checks.front().id == "a/first");
    CHECK(r.failures() == 2);
    CHECK_FALSE(r.all_pass());
    CHECK(r.checks[2].pass == false);  // NaN never passes
    const json j = to_json(r);
    CHECK(j["failures"] == 2);
    CHECK(j["checks"].size() == 3);
    const std::string csv = report_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const std::string tcsv = table_csv(r.tables[0]);
    CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 3);
    const std::string md = reports_markdown({r});
    CHECK(md.find("demo") != std::string::npos);
    CHECK(md.find("FAIL") != std::string::npos);
  }

  TEST_CASE("write_reports") {
    const auto dir = std::filesystem::temp_directory_path() / "derham_driver_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const Report r = sample_report();
    auto files = write_reports({r}, "json", dir.string());
    REQUIRE(files.size() == 1);
    CHECK(json::parse(slurp(files[0]))["suite"] == "demo");
    files = write_reports({r}, "csv", dir.string());
    CHECK(files.size() == 2);
    files = write_reports({r}, "markdown", dir.string());
    REQUIRE(files.size() == 1);
    CHECK(std::filesystem::path(files[0]).filename() == "summary.md");
    CHECK_THROWS(write_reports({r}, "xml", dir.string()));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("schema validator") {
    const json s = json::parse(R"({
      "type": "object", "required": ["a"], "additionalProperties": false,
      "properties": {
        "a": {"type": "integer", "minimum": 1, "maximum": 3},
        "b": {"type": "string", "enum": ["x", "y"]},
        "c": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1, "maxItems": 2}
      }})");
    CHECK(schema_violations(s, json{{"a", 2}}).empty());
    CHECK(schema_violations(s, json{{"a", 2}, {"b", "x"}, {"c", {0.5}}}).empty());
    CHECK(schema_violations(s, json::object()).size() == 1);
    CHECK(schema_violations(s, json{{"a", 4}}).size() == 1);
    CHECK(schema_violations(s, json{{"a", 1.5}}).size() == 1);
    CHECK(schema_violations(s, json{{"a", 1}, {"b", "z"}}).size() == 1);
    CHECK(schema_violations(s, json{{"a", 1}, {"c", {0.0}}}).size() == 1);
    CHECK(schema_violations(s, json{{"a", 1}, {"c", {1, 2, 3}}}).size() == 1);
    const auto v = schema_violations(s, json{{"a", 1}, {"zz", 0}});
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("zz") != std::string::npos);
  }

  TEST_CASE("run config") {
    const RunConfig d = config_from_json(json::object());
    CHECK(d.seed == 7);
    CHECK(d.suite == "all");
    CHECK(d.tol.T_homotopy == 5e-4);
    const RunConfig c = config_from_json(json{{"suite", "kernel"}, {"n", 3}, {"seed", 11}, {"tolerances", {{"kernel", 1e-9}}}});
    CHECK(c.dims == std::vector<int>{3});
    CHECK(c.seed == 11);
    CHECK(c.tol.kernel == 1e-9);
    CHECK(schema_violations(run_config_schema(), c.to_json()).empty());
    CHECK(schema_violations(run_config_schema(), d.to_json()).empty());
    CHECK(config_from_json(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS_AS(config_from_json(json{{"n", 9}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"suite", "nope"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"extra", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_file("/nonexistent/config.json"), ConfigError);
    CHECK_THROWS_AS(run_suite("nope", d), ConfigError);
  }

  TEST_CASE("suite reports are deterministic") {
    RunConfig c = config_from_json(json{{"suite", "algebra"}, {"n", 2}});
    Report a = run_suite("algebra", c), b = run_suite("algebra", c);
    CHECK(a.all_pass());
    a.environment = b.environment = json::object();
    CHECK(canonical_json(to_json(a)) == canonical_json(to_json(b)));
  }
}

TEST_SUITE("parallel") {
  TEST_CASE("serial and parallel batches agree exactly") {
    const ThetaBump theta = make_tensor_bump(2, std::vector<Rational>{0, 0}, Rational(1, 2), 2);
    const PoincareContext pc(theta);
    const auto s = homotopy_defect_batch(pc, 1, 12, 3, 5, Execution::serial);
    const auto p = homotopy_defect_batch(pc, 1, 12, 3, 5, Execution::parallel);
    CHECK(s.forms == p.forms);
    CHECK(s.nonzero == p.nonzero);
    CHECK(s.nonzero == 0);
    CHECK(s.max_degree_seen == p.max_degree_seen);

    const BogovskiiContext ctx(theta);
    std::mt19937_64 rng(2);
    const SampledForm u = profile_form(radial_bump_field(std::vector<double>{0.6, 0.2}, 0.5, 3), random_polyform(2, 1, 2, rng));
    const auto pts = kronecker_points(Box{{-0.5, -0.5}, {1.2, 1.0}}, 12);
    CHECK(bogovskii_T_batch(ctx, u, pts, Execution::serial) == bogovskii_T_batch(ctx, u, pts, Execution::parallel));
  }

  TEST_CASE("parallel_for rethrows and thread_cap honours the environment") {
    CHECK_THROWS_AS(parallel_for(8, [](std::size_t i) { if (i == 5) throw ContractViolation("x"); }), ContractViolation);
    setenv("DERHAM_THREADS", "1", 1);
    CHECK(thread_cap() == 1);
    setenv("DERHAM_THREADS", "3", 1);
    CHECK(thread_cap() == 3);
    unsetenv("DERHAM_THREADS");
    CHECK(thread_cap() >= 1);
  }
}
