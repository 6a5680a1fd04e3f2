// In-process command-line driver, exercised directly by tests and wrapped by
// the binary's main().
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace soac {

// Runs one command line (program name excluded) against the given streams.
// Exit codes: 0 success / decision yes; 1 decision no, unmet decomposition
// budget, or benchmark disagreement; 2 usage, parse, or model errors;
// 3 exhausted search budget.
int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace soac
