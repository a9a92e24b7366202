#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wdecay/config.hpp"

namespace wdecay {

enum ExitCode : int { kExitPass = 0, kExitInfrastructure = 1, kExitThreshold = 2, kExitVerdict = 3 };

const std::vector<std::string>& subcommands();

// Runs one subcommand, writes its report(s) into c.out and returns the exit code.
int dispatch(const std::string& subcommand, const RunConfig& c, std::ostream& log, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace wdecay
