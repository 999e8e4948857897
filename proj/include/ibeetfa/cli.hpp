#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ibeetfa {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotEqual = 1;
inline constexpr int kExitReject = 2;
inline constexpr int kExitInvalidParams = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitLoad = 65;
inline constexpr int kExitInternal = 70;

// Runs one verb. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ibeetfa
