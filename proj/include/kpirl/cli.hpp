#pragma once

#include <string>
#include <vector>

#include "kpirl/trajectory.hpp"

namespace kpirl {

// Full command-line entry point (argv without the program name). Returns the
// process exit code: 0 ok, 1 I/O or config failure, 2 usage, 3 partial
// failure across per-match work items.
int run_cli(const std::vector<std::string>& args);

// The default controlled agent for a match: the explicitly recorded one if
// present, otherwise the blue agent that stays alive longest (ties to the
// smallest id).
std::string choose_controlled_agent(const Match& match);

}  // namespace kpirl
