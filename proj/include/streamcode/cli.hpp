#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace streamcode::cli {

/// Exit codes: 0 when every requested check passes, 1 when a check fails,
/// 2 for usage and parameter errors.
inline constexpr int k_exit_ok = 0;
inline constexpr int k_exit_check_failed = 1;
inline constexpr int k_exit_usage = 2;

/// Runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Canonical invocation stored in an output's comment header, or empty.
std::string invocation_from_header(const std::string& output);

/// Splits a canonical invocation line into arguments (whitespace separated).
std::vector<std::string> split_invocation(const std::string& line);

} // namespace streamcode::cli
