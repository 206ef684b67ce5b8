#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace isomush::cli {

// Runs the command line; args excludes the program name. Returns the exit
// code: 0 ok, 1 usage, 2 I/O, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Deterministic, never-black colour for a universe index.
std::uint32_t universe_color(int index);

}  // namespace isomush::cli
