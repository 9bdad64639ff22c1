#pragma once

namespace cst {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitSolver = 1,  // infeasible, solver limit or solver failure
    kExitUsage = 2,   // bad arguments or configuration
    kExitIo = 3,
};

// Entry point of `cstdispatch`; never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace cst
