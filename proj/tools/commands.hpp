#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oiltrade::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kConfigEnv = "OILTRADE_CONFIG";

enum ExitCode : int { kOk = 0, kUsageError = 1, kDataError = 2 };

// Runs one subcommand. args[0] is the program name, as in argv.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oiltrade::cli
