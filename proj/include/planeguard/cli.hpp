#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace planeguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

inline constexpr const char* kKeyEnv = "PLANEGUARD_KEY";
inline constexpr const char* kVersion = "0.1.0";

/// Runs one command line (args[0] is the program name). Artifacts go to the
/// paths named by flags, results to `out`, diagnostics and progress to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace planeguard::cli
