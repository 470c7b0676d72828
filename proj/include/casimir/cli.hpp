#pragma once

#include <ostream>

namespace casimir::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kParseError = 2,
  kNonConvergence = 3,
  kBudgetExceeded = 4,
};

// Subcommands: pfa, roundtrip, wkb-check, materials. Tables go to `out`
// (or to --output), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace casimir::cli
