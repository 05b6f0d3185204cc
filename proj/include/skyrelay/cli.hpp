#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skyrelay::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kBoundFailure = 3 };

/// Shortest round-trip decimal form of v; "nan", "inf" and "-inf" for the specials.
std::string format_number(double v);

/// Parses a dB value; throws std::invalid_argument unless it is a finite number.
double parse_db(const std::string& text);

/**
 * Entry point of the command-line tool. `args` excludes the program name.
 * Results go to `out` (or to files named by flags), diagnostics to `err`.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skyrelay::cli
