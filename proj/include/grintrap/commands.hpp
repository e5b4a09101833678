#ifndef GRINTRAP_COMMANDS_HPP
#define GRINTRAP_COMMANDS_HPP

#include <string>

namespace grintrap::cli {

// Exit codes shared by all subcommands:
//   0  success
//   2  config error (message carries file:line:column)
//   3  the run terminated at the radius floor or by step failure
//      (the report is still written)
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CommandOptions {
    std::string config_path;
    std::string output_dir;  // highest-priority override; empty defers to config/env
    bool quiet = false;
};

int cmd_run(const CommandOptions& opts);
int cmd_sweep(const CommandOptions& opts);
int cmd_phase(const CommandOptions& opts);
int cmd_stability(const CommandOptions& opts);
int cmd_validate(const CommandOptions& opts);

// Flag > config > GRINTRAP_OUTPUT_DIR env > current directory.
std::string resolve_output_dir(const CommandOptions& opts, const std::string& config_dir);

}  // namespace grintrap::cli

#endif  // GRINTRAP_COMMANDS_HPP
