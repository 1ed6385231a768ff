#pragma once

#include <string>
#include <vector>

namespace avgnet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 2,
  kExitConfigError = 3,
  kExitDiverged = 4,
};

// Parses argv (argv[0] is the program name) and runs one subcommand.
int RunCli(int argc, const char* const* argv);
int RunCli(const std::vector<std::string>& args);

}  // namespace avgnet::cli
