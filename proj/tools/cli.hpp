#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmqe/metrics.hpp"

namespace cmqe::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kNumericError = 3,
};

/// Runs one `cmqe` subcommand. `args` excludes the program name. Normal
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One record of the metrics file written by `cmqe metrics`.
nlohmann::json metric_record(const MetricVector& mv);

}  // namespace cmqe::cli
