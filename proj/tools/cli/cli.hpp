#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlab::cli {

/// `dlab <subcommand> --config FILE [--seed N] [--out DIR] [--quiet]`
///
/// Exit codes: 0 complete or PASS, 2 diagnostic FAIL, 1 error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dlab::cli
