#pragma once

#include <string>
#include <vector>

#include "fracenv/cli/config.hpp"
#include "fracenv/cli/outputs.hpp"

namespace fracenv::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_config = 2,
    exit_convergence = 3,
    exit_check = 4,
};

struct CommandResult {
    OutputSet outputs;
    std::vector<std::string> failures; ///< failed checks, empty on success

    bool passed() const { return failures.empty(); }
};

/// Subcommand names in dispatch order.
const std::vector<std::string>& command_names();

/// Runs one subcommand without touching the filesystem. Throws ConfigError
/// for configurations the command cannot use and ConvergenceError from the
/// solvers.
CommandResult run_command(const std::string& name, const Config& config, int workers);

/// Entry point: parses flags, runs the subcommand, writes outputs and maps
/// failures to exit codes.
int main(int argc, char** argv);

} // namespace fracenv::cli
