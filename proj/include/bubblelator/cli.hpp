#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bubblelator::cli {

enum ExitCode : int {
    ok = 0,
    io_failure = 1,
    parameter_error = 2,
    numerical_error = 3,
    unknown_subcommand = 64,
    unreadable_config = 66,
};

// "a:step:b" (inclusive, exact for rational input) or "v1,v2,...".
std::vector<double> parse_values(std::string_view text);

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bubblelator::cli
