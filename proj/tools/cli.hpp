#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace citegraph::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

/// Runs one command line (args[0] is the program name). Machine-readable
/// results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace citegraph::cli
