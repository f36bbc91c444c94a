#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace hkernel {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,          // positive answer or plain success
  kExitNegative = 1,    // unreachable, no kernel, nothing found in bounds
  kExitUnknown = 2,     // a path budget ran out before an answer
  kExitUsage = 64,      // bad flags or arguments
  kExitData = 65,       // malformed or inconsistent input
  kExitNoInput = 66,    // unreadable input file
  kExitSoftware = 70,   // internal check failed
  kExitInterrupted = 75 // search stopped early; checkpoint written
};

/// Runs one command line. `stop` (may be null) interrupts searches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::atomic<bool>* stop = nullptr);

}  // namespace hkernel
