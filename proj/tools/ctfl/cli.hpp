#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctfl::cli {

/// Exit statuses shared by every subcommand.
enum Exit : int { ok = 0, verify_failed = 1, usage = 2, cap = 3 };

/// Parses argv and runs one subcommand. Tables go to `out` (or --out),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctfl::cli
