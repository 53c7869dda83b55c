#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twoscale::cli {

/// Runs one subcommand. args[0] is the program name.
/// Returns 0 on success, 2 on a usage error, 1 when the computation fails.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twoscale::cli
