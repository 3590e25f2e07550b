#pragma once

#include <string>
#include <vector>

namespace curvelab {

/// Exit codes of the front-end.
enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericError = 3 };

/// Runs one subcommand; args excludes the program name.
int cli_dispatch(const std::vector<std::string>& args);
int cli_dispatch(int argc, char** argv);

}  // namespace curvelab
