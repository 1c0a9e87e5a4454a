#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsob::cli {

enum ExitCode : int {
  ok = 0,
  validation_error = 2,
  non_convergence = 3,
  hard_violation = 4,
};

/// Entry point behind the `nsob` executable. `args` excludes the program
/// name: `<subcommand> --config FILE [--out-dir DIR] [flags]`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The subcommand names, in usage order.
const std::vector<std::string>& subcommands();

}  // namespace nsob::cli
