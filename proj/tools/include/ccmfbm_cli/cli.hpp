#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccmfbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

/// Parses argv, dispatches the subcommand and returns the process exit code.
/// Tables go to --output (or `out` when absent); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccmfbm::cli
