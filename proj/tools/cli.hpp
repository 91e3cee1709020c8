#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace densel::cli {

/// Parses argv (without the program name) and runs one subcommand. Returns the
/// process exit code: 0 on success, 2 on usage errors, 1 on runtime failures.
/// CSV output goes to --out files, or to `out` when no file is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace densel::cli
