#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nqbell::cli {

/// Runs one command. JSON goes to out (or the --output file), diagnostics to err.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nqbell::cli
