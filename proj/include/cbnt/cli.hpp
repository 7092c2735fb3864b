#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbnt {

// Runs one subcommand; args excludes the program name. Returns 0 on
// success or "equal", 1 on "far" or a failed check, 2 on usage/input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cbnt
