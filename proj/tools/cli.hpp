#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitSolver = 4;

// Runs the command line `args` (args[0] is the program name) and returns the
// process exit code.  Diagnostics go to `err`, command output to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csc::cli
