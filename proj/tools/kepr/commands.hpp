#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace kepr::cli {

enum ExitCode : int { kOk = 0, kInvalidConfig = 1, kNumericalFailure = 2 };

struct Payload {
  /// JSON or CSV written to `output` (stdout when unset).
  std::string primary;
  /// Trajectory CSV for `simulate`, written to `csv` when set.
  std::optional<std::string> csv;
  int exit_code = kOk;
};

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double value);

/// Runs a resolved configuration. `timestamp` is stored only in the JSON
/// `metadata.generated_at` field.
Payload execute(const RunConfig& config, const std::string& timestamp);

/// execute() plus file output; diagnostics go to `err`. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace kepr::cli
