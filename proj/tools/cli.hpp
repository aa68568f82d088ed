#pragma once

#include <ostream>

namespace pvisit {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitResourceLimit = 3 };

/// Entry point of the `pvisit` command line tool. Data goes to `out`,
/// diagnostics to `err`. Worker count comes from PVISIT_WORKERS.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pvisit
