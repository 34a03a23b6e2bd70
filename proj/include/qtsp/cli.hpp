#pragma once

#include <iosfwd>

namespace qtsp {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitInfeasible = 3,
  kExitSizeBound = 4,
};

// Entry point for the qtsp binary; writes to the given streams instead of
// std::cout/std::cerr so it can be driven in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtsp
