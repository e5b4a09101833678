// grintrap command-line front end: single-run, sweep, phase-space, stability
// map, and profile validation subcommands. Physics parameters live in the
// config file; flags only pick the subcommand, config path, output directory,
// and verbosity.

#include <CLI11.hpp>

#include "grintrap/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"geodesic light trapping in gradient-index attractor profiles"};
    app.require_subcommand(1);

    grintrap::cli::CommandOptions opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", opts.config_path, "run configuration file")->required();
        cmd->add_option("-o,--output-dir", opts.output_dir,
                        "output directory (overrides config and GRINTRAP_OUTPUT_DIR)");
        cmd->add_flag("-q,--quiet", opts.quiet, "suppress the summary line");
    };

    CLI::App* run = app.add_subcommand("run", "integrate one ray and classify the orbit");
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    CLI::App* phase = app.add_subcommand("phase", "emit phase-space tables");
    CLI::App* stability = app.add_subcommand("stability", "tabulate the linearized stability map");
    CLI::App* validate = app.add_subcommand("validate", "check a profile against its bounds");
    for (CLI::App* cmd : {run, sweep, phase, stability, validate}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return grintrap::cli::cmd_run(opts);
    if (sweep->parsed()) return grintrap::cli::cmd_sweep(opts);
    if (phase->parsed()) return grintrap::cli::cmd_phase(opts);
    if (stability->parsed()) return grintrap::cli::cmd_stability(opts);
    if (validate->parsed()) return grintrap::cli::cmd_validate(opts);
    return 1;
}
