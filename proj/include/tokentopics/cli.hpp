#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tokentopics {

// Runs the command-line tool on `args` (without the program name).
// Exit codes: 0 success, 1 I/O or file-format failure, 2 usage or
// configuration error, 3 data integrity or other runtime failure.
// Failures are reported on `err` as a single JSON line.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace tokentopics
