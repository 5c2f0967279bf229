#pragma once

#include <string>
#include <vector>

namespace hyperot {

// Subcommands: hpd, solve, parametrize, render.
// Exit codes: 0 ok, 2 input error, 3 geometry error, 4 nonconvergence.
int run_cli(const std::vector<std::string>& args);

}  // namespace hyperot
