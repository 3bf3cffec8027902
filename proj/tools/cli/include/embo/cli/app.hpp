#pragma once

namespace embo::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitVerification = 4,
};

/// Parses argv, runs one verb and maps failures to exit codes. Diagnostics
/// go to stderr, the one-line summary to stdout.
int run_cli(int argc, char** argv);

}  // namespace embo::cli
