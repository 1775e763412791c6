#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evcs::app {

/// Runs one `evcs` subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on input errors, 2 on numeric failures.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evcs::app
