#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "polaron/cli/config.hpp"

namespace polaron::cli {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kNoConvergence = 1, kInvalidInput = 2, kVerifyFailure = 3 };

/// Exit status for an exception escaping a task.
int exit_code_for(const std::exception& e);

/// Caps OpenMP threads from POLARON_THREADS. Returns the cap, or 0 when unset.
int apply_thread_cap();

/// Write to a sibling temporary and rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// In-memory result of a task, before anything is written.
struct TaskResult {
  Json document;
  std::string csv;  // scan-binding only
  Json diagnostics;
  bool verified = true;
};

TaskResult compute_task(const RunConfig& cfg);

struct RunOutcome {
  int exit_code = kOk;
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

/// Validate, compute, write result files and the manifest into
/// cfg.output_dir and print the machine result to out. Errors go to err as
/// one line and become exit codes.
RunOutcome run_task(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Aggregate the manifests in dir, keyed by config hash.
Json emit_report(const std::filesystem::path& dir);

}  // namespace polaron::cli
