#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nighthaze::cli {

inline constexpr const char* kToolVersion = "nighthaze 0.1.0";

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kIoError = 3,
  kDimensionError = 4,
};

// Runs one command line (args excludes the program name). Diagnostics go to
// `err`, progress and tables to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nighthaze::cli
