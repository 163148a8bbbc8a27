#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmms {

/// Runs the command line tool. `args` excludes the program name.
/// Returns the process exit code; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmms
