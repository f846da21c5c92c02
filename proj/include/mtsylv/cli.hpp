#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mtsylv {

/// Entry point of the `mtsylv` tool; `args` excludes the program name.
/// Subcommands: solve, gen, spectrum. Exit codes: 0 converged (or success),
/// 2 max-iter reached, 3 diverged, 1 usage, parse, I/O or numerical errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mtsylv
