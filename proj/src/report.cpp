#include "derham/report.hpp"

#include <gmp.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "derham/parallel.hpp"

namespace derham {

CheckRecord& Report::add(std::string id, std::string description, const nlohmann::json& inputs, double residual,
                         double tolerance, nlohmann::json details) {
  CheckRecord c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.inputs_digest = inputs_digest(inputs);
  c.residual = residual;
  c.tolerance = tolerance;
  c.pass = residual <= tolerance;
  c.details = std::move(details);
  checks.push_back(std::move(c));
  return checks.back();
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

int Report::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckRecord& c) { return !c.pass; }));
}

double Report::max_residual() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::isnan(c.residual) ? c.residual : std::max(m, c.residual);
  return m;
}

void Report::finalize() {
  std::stable_sort(checks.begin(), checks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::stable_sort(tables.begin(), tables.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string inputs_digest(const nlohmann::json& j) { return fnv1a_hex(canonical_json(j, -1)); }

nlohmann::json environment_fingerprint(double elapsed_seconds) {
  nlohmann::json e;
#if defined(__clang__)
  e["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  e["compiler"] = std::string("gcc ") + __VERSION__;
#else
  e["compiler"] = "unknown";
#endif
  e["openmp"] = _OPENMP;
  e["threads"] = thread_cap();
  e["gmp"] = gmp_version;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  e["time"] = buf;
  e["elapsed_seconds"] = elapsed_seconds;
  return e;
}

namespace {

std::string number17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (pretty) out += '\n' + std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += pretty ? ": " : ":";
        dump(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // short numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& v) { return v.is_primitive(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat && pretty ? ", " : ",";
        if (!flat) newline(depth + 1);
        dump(j[i], indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += number17(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + '"';
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

std::string canonical_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["config"] = r.config;
  j["environment"] = r.environment;
  j["pass"] = r.all_pass();
  j["failures"] = r.failures();
  j["max_residual"] = r.max_residual();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"id", c.id},
                           {"description", c.description},
                           {"inputs_digest", c.inputs_digest},
                           {"residual", c.residual},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"details", c.details}});
  }
  j["tables"] = nlohmann::json::array();
  for (const auto& t : r.tables) j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}});
  return j;
}

std::string report_csv(const Report& r) {
  std::string s = "suite,id,description,inputs_digest,residual,tolerance,pass\n";
  for (const auto& c : r.checks) {
    s += csv_field(r.suite) + ',' + csv_field(c.id) + ',' + csv_field(c.description) + ',' + c.inputs_digest + ',' +
         number17(c.residual) + ',' + number17(c.tolerance) + ',' + (c.pass ? "true" : "false") + '\n';
  }
  return s;
}

std::string table_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + csv_field(t.columns[i]);
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + number17(row[i]);
    s += '\n';
  }
  return s;
}

std::string reports_markdown(const std::vector<Report>& reports) {
  std::ostringstream s;
  auto g = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  s << "| suite | checks | failed | max residual | verdict |\n|---|---|---|---|---|\n";
  for (const auto& r : reports)
    s << "| " << r.suite << " | " << r.checks.size() << " | " << r.failures() << " | " << g(r.max_residual()) << " | "
      << (r.all_pass() ? "pass" : "FAIL") << " |\n";
  for (const auto& r : reports) {
    s << "\n## " << r.suite << " (seed " << r.seed << ")\n\n| check | residual | tolerance | verdict |\n|---|---|---|---|\n";
    for (const auto& c : r.checks)
      s << "| " << c.id << " | " << g(c.residual) << " | " << g(c.tolerance) << " | " << (c.pass ? "pass" : "FAIL")
        << " |\n";
  }
  return s.str();
}

std::vector<std::string> write_reports(const std::vector<Report>& reports, const std::string& format,
                                       const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const fs::path p = fs::path(dir) / name;
    write_file(p, text);
    written.push_back(p.string());
  };
  if (format == "markdown") {
    put("summary.md", reports_markdown(reports));
    return written;
  }
  for (const auto& r : reports) {
    if (format == "json") {
      put(r.suite + ".json", canonical_json(to_json(r)) + "\n");
    } else if (format == "csv") {
      put(r.suite + ".csv", report_csv(r));
      for (const auto& t : r.tables) put(r.suite + "__" + t.name + ".csv", table_csv(t));
    } else {
      throw std::runtime_error("unknown report format '" + format + "'");
    }
  }
  return written;
}

}  // namespace derham
