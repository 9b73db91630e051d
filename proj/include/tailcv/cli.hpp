#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailcv::cli {

/// Runs the command line. Data goes to the files named on the command line;
/// `out` only receives short summaries and `err` all diagnostics. Returns the
/// process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace tailcv::cli
