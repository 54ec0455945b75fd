#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace helfrich::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kMissingFile = 3;
inline constexpr int kNumerical = 4;

/// Runs one command line (args[0] is the program name). Reports go to `out`,
/// messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace helfrich::cli
