#pragma once

// Verification suites shared by the command-line driver and the acceptance
// test. Each suite turns a RunConfig into a Report of checks; a check carries
// its achieved residual, the tolerance it was held to and a digest of its
// inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "derham/bogovskii.hpp"
#include "derham/report.hpp"

namespace derham {

struct Tolerances {
  double T_homotopy = 5e-4;
  double R_homotopy = 5e-4;
  double R_exact = 1e-5;  // numeric R against the exact polynomial R, relative to sup |R u|
  double support = 1e-9;
  double adjoint = 1e-5;
  double kernel = 1e-8;
  double weak_singularity = 0.02;
  double plateau = 0.01;
  double symbol_zero = 1e-10;
  double consistency = 1e-3;
  double glue = 1e-4;
  double commutation = 1e-3;
  double degeneration = 1e-10;
};

struct SymbolSettings {
  double xi_max = 1000.0;
  int directions = 8;
  int per_decade = 10;
  double plateau_from = 100.0;
  double tau_max = 400.0;
  int panel_points = 10;
  bool consistency = false;
};

struct RunConfig {
  std::string suite = "all";
  std::vector<int> dims;  // empty: the suite's default dimensions
  std::optional<int> l;   // unset: every degree
  int degree = 4;
  std::uint64_t seed = 7;
  int forms = 100;
  int points = 25;
  int pairs = 10;
  int kernel_pairs = 50;
  std::optional<nlohmann::json> theta;  // {kind, center, r, k}; n is filled in per dimension
  Cubature cubature;
  int line_points = 16;
  double fd_step = 1e-4;
  bool five_point = false;
  SymbolSettings symbol;
  std::string cover = "L";
  Tolerances tol;
  std::string out = ".";
  std::string format = "json";

  nlohmann::json to_json() const;
};

/// Validates j against the run-config schema, then reads it. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
/// Reads and validates a config file. Throws ConfigError.
RunConfig config_from_file(const std::string& path);

/// Suite ids in run order (without "all").
const std::vector<std::string>& suite_names();

/// Runs one suite. Throws ConfigError for unknown suites or unusable settings.
Report run_suite(const std::string& suite, const RunConfig& cfg);
/// cfg.suite, or every suite for "all".
std::vector<Report> run_suites(const RunConfig& cfg);

}  // namespace derham
