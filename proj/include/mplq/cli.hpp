#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mplq {

// Exit codes: 0 success, 1 infeasible plan / refused / nothing to solve,
// 2 usage or parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace mplq
