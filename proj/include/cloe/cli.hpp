#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cloe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Runs the command line `cloe <subcommand> ...`; args excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 when reading inputs or computing fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cloe
