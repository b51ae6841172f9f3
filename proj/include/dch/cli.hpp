#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dch {

/// Runs one `dch` command.  `args` excludes the program name.  Returns 0 on
/// success, 1 on invalid input, 2 on numerical failure; errors go to `err`
/// as a one-line JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dch
