#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ctrace::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

// Runs one subcommand; args excludes the program name. Results go to `out`
// (or the --out file), diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctrace::cli
