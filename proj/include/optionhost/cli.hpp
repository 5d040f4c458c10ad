#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optionhost {

// Exit codes besides a propagated child status.
inline constexpr int kExitSetupFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `optionhost` tool. `args[0]` is the program name.
// Subcommands: validate, preview, run, export, emit, serve.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace optionhost
