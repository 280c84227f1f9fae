#ifndef MCABRL_CLI_COMMANDS_H_
#define MCABRL_CLI_COMMANDS_H_

#include "cli/run_config.h"

namespace mcabrl::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDataError = 2,
  kExitNotConverged = 3,
};

int cmd_mine(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_predict(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
int cmd_render(const RunConfig& config);
int cmd_benchmark(const RunConfig& config);

// Parses the command line (plus an optional --config key=value file, flags
// winning), dispatches, and maps errors to exit codes.
int run(int argc, char** argv);

}  // namespace mcabrl::cli

#endif  // MCABRL_CLI_COMMANDS_H_
