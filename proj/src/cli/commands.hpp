#pragma once

#include <string>
#include <vector>

namespace tbq::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInsufficientStatistics = 3 };

/// Entry point shared by the `tbq` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args);

}  // namespace tbq::cli
