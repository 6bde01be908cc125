#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace annopipe {

/// Full CLI entry point: parses `args` (no program name), runs the command,
/// writes human output to `out` and single-line machine-parseable error JSON
/// to `err`. Returns the process exit code:
///   0 success, 1 usage/config error, 2 workflow-gate violation,
///   3 backend failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace annopipe
