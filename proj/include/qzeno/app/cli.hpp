#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qzeno::app {

enum ExitStatus { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitContract = 3 };

/// Entry point of the qzeno tool. `args` includes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qzeno::app
