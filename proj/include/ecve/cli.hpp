#pragma once

#include <iosfwd>

namespace ecve::cli {

/// Exit statuses of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1; ///< runtime failure or failed check
inline constexpr int kUsage = 2;   ///< bad arguments, unknown identifiers

/// Entry point for `ecve <command> [options]`. Normal output goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ecve::cli
