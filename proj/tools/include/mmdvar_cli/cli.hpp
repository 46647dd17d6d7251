#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmdvar::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kPreconditionError = 3,
  kVerificationFailed = 4,
  kInternalError = 1,
};

/// Runs the command line `args` (without the program name), writing the
/// report to `out` and one-line diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmdvar::cli
