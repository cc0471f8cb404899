#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psc::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code; diagnostics go to `err`, progress lines to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace psc::cli
