#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "swarm/system.hpp"

namespace swarm {

/// Exit codes of cli_main.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // bad arguments, unreadable or invalid system
inline constexpr int kExitRuntime = 2;  // failure while running

/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

/// Loads "builtin:NAME" or a system document from disk.
SystemDefinition load_source(const std::string& source);

}  // namespace swarm
