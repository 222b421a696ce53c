#pragma once

#include <iosfwd>

namespace sfgcav::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNotConverged = 2 };

/// Runs the command line `argv` writing the report to `out` and diagnostics
/// to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfgcav::cli
