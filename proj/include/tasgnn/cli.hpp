#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tasgnn {

// Runs the command-line front end. Returns the process exit status; failures
// print exactly one line `error: <category>: <message>` to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tasgnn
