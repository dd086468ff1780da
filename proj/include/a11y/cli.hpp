#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "a11y/report.hpp"
#include "a11y/runner.hpp"

namespace a11y {

struct RunConfig {
  std::vector<std::filesystem::path> app_paths;   // files or directories of *.json
  std::vector<std::filesystem::path> test_paths;  // files or directories of *.txt
  std::string backend;                            // "scripted:<path>" or "http:<url>"
  std::filesystem::path out_dir;
  int parallel = 1;
  std::optional<long long> seed;
  std::string model = "gpt-4";
  RunnerConfig runner;
  ExportOptions export_options;
};

struct RunResult {
  std::string test_name;
  std::string status;  // final status, or "error"
  std::size_t findings = 0;
  std::size_t issues = 0;  // fail findings
  std::filesystem::path out;
  std::string error;
};

/// Runs every test: parse, replay, export. Configuration problems throw
/// UsageError before any test starts; per-test failures land in the result.
/// Results keep input order regardless of parallelism.
std::vector<RunResult> run_batch(const RunConfig& config);

/// Exit 0 when every test exported, 1 when any failed, 2 on usage errors.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace a11y
