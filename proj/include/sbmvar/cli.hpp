#pragma once

// Command-line front end. Exit codes: 0 success, 2 config error, 3 data error,
// 4 numerical failure.

#include "sbmvar/errors.hpp"

namespace sbmvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

int exit_code_for(ErrorKind kind) noexcept;

/// Parses argv and runs one subcommand: generate, fit, predict, sweep, select-k, eval.
int run(int argc, const char* const* argv);

}  // namespace sbmvar::cli
