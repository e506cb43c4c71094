#pragma once

// Check records and report files. JSON numbers are written with 17
// significant digits and object keys in sorted order, so two runs with the
// same config and seed give identical files apart from "environment".

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace derham {

struct CheckRecord {
  std::string id;
  std::string description;
  std::string inputs_digest;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

/// A numeric table written as its own CSV (curves, per-point residuals).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  std::vector<Table> tables;
  nlohmann::json environment = nlohmann::json::object();

  /// residual <= tolerance (NaN fails); records the verdict and returns it.
  CheckRecord& add(std::string id, std::string description, const nlohmann::json& inputs, double residual,
                   double tolerance, nlohmann::json details = nlohmann::json::object());
  bool all_pass() const;
  int failures() const;
  double max_residual() const;
  /// Sorts checks and tables by id / name.
  void finalize();
};

/// 64-bit FNV-1a, hex.
std::string fnv1a_hex(const std::string& bytes);
/// Digest of the canonical dump of j.
std::string inputs_digest(const nlohmann::json& j);

/// Compiler, OpenMP, thread cap, GMP version, UTC time, elapsed seconds.
nlohmann::json environment_fingerprint(double elapsed_seconds);

/// Canonical JSON text: sorted keys, %.17g numbers, non-finite numbers as null.
std::string canonical_json(const nlohmann::json& j, int indent = 2);
nlohmann::json to_json(const Report& r);
std::string report_csv(const Report& r);
std::string table_csv(const Table& t);
/// Summary table (one row per suite, max residual) then one table per suite.
std::string reports_markdown(const std::vector<Report>& reports);

/// Writes <suite>.json, <suite>.csv (+ <suite>__<table>.csv) or summary.md into
/// dir, creating it. Returns the paths written. Throws std::runtime_error on I/O failure.
std::vector<std::string> write_reports(const std::vector<Report>& reports, const std::string& format,
                                       const std::string& dir);

}  // namespace derham
