#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pgadget {

/// Runs the command line (args excludes the program name). Exit codes:
/// 0 success or pass, 1 quantitative failure or resource stop, 2 bad input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgadget
