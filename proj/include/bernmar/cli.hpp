#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bernmar {

//! Runs the command-line interface on `args` (without the program name).
//! Returns the process exit code: 0 on success, 1 for input errors and
//! 2 when an estimate cannot be computed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

//! Library version string.
const char* version();

} // namespace bernmar
