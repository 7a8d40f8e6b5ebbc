#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace leadframe {

/// Exit statuses shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitInput = 2 };

/// Entry point for the `leadframe` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leadframe
