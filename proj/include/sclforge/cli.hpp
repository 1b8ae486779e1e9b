#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sclforge::cli {

/// Runs one command line (without the program name). Exit codes: 0 on
/// pass/HALT, 1 on fail/exhausted, 2 on usage or input errors. A path of
/// "-" reads from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace sclforge::cli
