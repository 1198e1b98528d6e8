#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "condpoint/config.hpp"
#include "condpoint/json_out.hpp"

namespace condpoint {

/// What a task produced: a JSON artifact, an optional CSV, and whether every
/// requested verdict came out as asked.
struct TaskResult {
  bool pass = false;
  io::Json json;
  std::string csv;
};

/// Task runners shared by the CLI subcommands and `run`. `params` follows
/// the per-task keys listed in README.md. `tol` <= 0 keeps the
/// defaults.
TaskResult run_window_task(const Model& model, const nlohmann::json& params, double tol,
                           unsigned threads = 0);
TaskResult run_density_task(const Model& model, const nlohmann::json& params, double tol);
TaskResult run_factorize_task(const Model& model, const nlohmann::json& params);
TaskResult run_verify_task(const Model& model, const nlohmann::json& params, double tol);
TaskResult run_paradox_task(const nlohmann::json& params, std::uint64_t seed);

struct SuiteOptions {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;  // master seed for scenarios without their own
  bool parallel = false;
  unsigned threads = 0;
};

struct ScenarioOutcome {
  std::string name;
  std::string task;
  bool pass = false;
  std::string error_kind;
  std::string message;
  std::vector<std::string> artifacts;
};

struct SuiteResult {
  std::vector<ScenarioOutcome> scenarios;

  bool pass() const;
  /// Schema "condpoint.summary".
  io::Json summary() const;
  io::Json failures() const;
};

/// Runs every scenario of a suite file and writes its artifacts. Throws
/// Error(Config) when the suite itself or a referenced config is invalid.
SuiteResult run_suite(const std::filesystem::path& suite, const SuiteOptions& options);

/// (y, value) pairs read from a pointwise/density artifact or a single trace.
/// `spec` is a path optionally followed by ":/json/pointer".
struct Table {
  std::string source;
  std::vector<double> y;
  std::vector<double> value;
};
Table read_table(const std::string& spec);

struct CompareReport {
  Table a;
  Table b;
  double tol = 0.0;
  std::vector<double> diff;
  double max_diff = 0.0;
  bool pass = false;
};

/// Throws Error(GridMismatch) when the y lists differ.
CompareReport compare(const Table& a, const Table& b, double tol);
/// Schema "condpoint.compare".
io::Json to_json(const CompareReport& r);

}  // namespace condpoint
