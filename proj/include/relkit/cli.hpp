#pragma once

#include "relkit/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace relkit::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kConfig = 2,
    kOracle = 3,
    kData = 4,
};

/// Runs one subcommand. `args` excludes the program name. JSONL is read from
/// `in` unless --input is given and written to `out` unless --output is
/// given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

} // namespace relkit::cli
