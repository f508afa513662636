#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semibart {

// Entry point behind the `semibart` executable: subcommands fit, simulate,
// replicate, and curve. Returns the process exit code; diagnostics go to
// `err`, and curve results without --out go to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semibart
