#pragma once

#include <iosfwd>

namespace equishrink::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kDomain = 3 };

/// Runs the tool on argv; normal output goes to `out` unless --out names a
/// file, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace equishrink::cli
