#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace langgeo {

/// Exit status of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_invalid = 2,
    exit_numeric = 3,
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace langgeo
