#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace suborbit {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailedBound = 1;
inline constexpr int kExitConfigError = 2;

/// Runs one subcommand. args excludes the program name. Exit codes:
/// 0 every check passed, 1 a bound failed, 2 config or precondition error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace suborbit
