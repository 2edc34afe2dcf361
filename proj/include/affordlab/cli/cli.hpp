#pragma once

#include <iosfwd>

namespace affordlab::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,          // runtime failure: divergence, I/O, low success
  kUsage = 2,            // bad flags or configuration
  kMissingArtifact = 3,  // a prerequisite file does not exist
};

// Entry point of the `afford` tool; output goes to `out`/`err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace affordlab::cli
