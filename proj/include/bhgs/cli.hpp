#pragma once

#include <iosfwd>

namespace bhgs {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  ///< unexpected internal error
  kExitConfig = 2,
  kExitNonExistence = 3,
  kExitCheckFailed = 4,
};

/// Entry point of the bhgs command line: gn, solve, sweep, check, plotdata.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bhgs
