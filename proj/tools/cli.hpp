#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace retrobell::cli {

inline constexpr const char* kToolName = "retrobell";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kComputationError = 1, kUsageError = 2 };

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Tables go to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Comma list "0,0.1,0.2" or inclusive range "start:stop:step".
std::vector<double> parse_grid(const std::string& text);

}  // namespace retrobell::cli
