#include "grintrap/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

#include "grintrap/analysis.hpp"
#include "grintrap/config.hpp"
#include "grintrap/systems.hpp"
#include "grintrap/table_io.hpp"

namespace grintrap::cli {

namespace {

std::string report_text(const RunConfig& cfg, const OrbitReport& rep, const PolarState& launch,
                        long steps_accepted, long steps_rejected) {
    std::ostringstream oss;
    oss << "# grintrap orbit report\n";
    oss << "report.classification = " << to_string(rep.classification) << "\n";
    oss << "report.premise = " << rep.premise << "\n";
    oss << "report.termination = " << to_string(rep.termination) << "\n";
    oss << "report.r_min = " << format_g17(rep.r_min) << "\n";
    oss << "report.r_max = " << format_g17(rep.r_max) << "\n";
    oss << "report.width = " << format_g17(rep.width) << "\n";
    oss << "report.radial_frequency = " << format_g17(rep.radial_frequency) << "\n";
    oss << "report.ell_drift = " << format_g17(rep.ell_drift) << "\n";
    oss << "report.apside_pairs = " << rep.apside_pairs << "\n";
    oss << "report.min_band_spread = " << format_g17(rep.min_band_spread) << "\n";
    oss << "report.max_band_spread = " << format_g17(rep.max_band_spread) << "\n";
    oss << "report.phi_dot_min = " << format_g17(rep.phi_dot_min) << "\n";
    oss << "report.phi_dot_max = " << format_g17(rep.phi_dot_max) << "\n";
    oss << "report.horizon_reached = " << format_g17(rep.horizon) << "\n";
    oss << "report.steps_accepted = " << steps_accepted << "\n";
    oss << "report.steps_rejected = " << steps_rejected << "\n";
    oss << "report.launch_r = " << format_g17(launch.r) << "\n";
    oss << "report.launch_phi = " << format_g17(launch.phi) << "\n";
    oss << "report.launch_r_dot = " << format_g17(launch.r_dot) << "\n";
    oss << "report.launch_phi_dot = " << format_g17(launch.phi_dot) << "\n";

    // Embedded resolved config; re-running from this file reproduces the run.
    std::istringstream conf(serialize_config(cfg));
    std::string line;
    std::string section;
    while (std::getline(conf, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        oss << "config." << section << "." << line << "\n";
    }
    return oss.str();
}

void write_trajectory_csv(const std::string& path, const RunConfig& cfg,
                          const Trajectory& traj) {
    CsvWriter csv(path,
                  {"param", "r", "phi", "r_dot", "phi_dot", "x", "y", "ell", "E_t"});
    const long dec = cfg.decimation;
    const std::size_t n = traj.knots();
    for (std::size_t i = 0; i < n; ++i) {
        if (i % static_cast<std::size_t>(dec) != 0 && i + 1 != n) continue;
        const double* y = traj.knot_state(i);
        const PolarState s = polar_state(y);
        const double ell = angular_momentum(cfg.profile, s);
        const double et = energy_supply_ratio(cfg.profile, s.r, s.r_dot, ell);
        csv.row({traj.params[i], s.r, s.phi, s.r_dot, s.phi_dot, s.r * std::cos(s.phi),
                 s.r * std::sin(s.phi), ell, et});
    }
}

int exit_code_for(const OrbitReport& rep) {
    if (rep.termination == Termination::Singularity ||
        rep.termination == Termination::StepFailure)
        return kExitRuntime;
    return kExitOk;
}

int config_error(const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
}

}  // namespace

std::string resolve_output_dir(const CommandOptions& opts, const std::string& config_dir) {
    if (!opts.output_dir.empty()) return opts.output_dir;
    if (!config_dir.empty()) return config_dir;
    if (const char* env = std::getenv("GRINTRAP_OUTPUT_DIR"); env && env[0]) return env;
    return ".";
}

int cmd_run(const CommandOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_run_config(opts.config_path);
        ConfigDoc doc = ConfigDoc::parse_file(opts.config_path);
        require_valid_profile(doc, cfg.profile);
    } catch (const ConfigError& e) {
        return config_error(e);
    }

    const std::string outdir = ensure_directory(resolve_output_dir(opts, cfg.output_dir));
    const PolarState launch = resolve_launch(cfg.profile, cfg.launch);
    const ScenarioResult sc = run_polar_scenario(cfg.profile, launch, cfg.options);

    write_trajectory_csv(outdir + "/trajectory.csv", cfg, sc.trajectory);
    write_text_file(outdir + "/orbit_report.txt",
                    report_text(cfg, sc.report, sc.launch, sc.trajectory.steps_accepted,
                                sc.trajectory.steps_rejected));
    write_text_file(outdir + "/resolved_config.toml", serialize_config(cfg));

    if (!opts.quiet) {
        std::cout << "run: " << to_string(sc.report.classification)
                  << " (termination " << to_string(sc.report.termination) << "), r in ["
                  << format_g17(sc.report.r_min) << ", " << format_g17(sc.report.r_max)
                  << "] -> " << outdir << "\n";
    }
    return exit_code_for(sc.report);
}

int cmd_sweep(const CommandOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_run_config(opts.config_path);
        if (!cfg.sweep) {
            std::cerr << "config error: " << opts.config_path
                      << ": sweep command needs a [sweep] section\n";
            return kExitConfig;
        }
        ConfigDoc doc = ConfigDoc::parse_file(opts.config_path);
        require_valid_profile(doc, cfg.profile);
    } catch (const ConfigError& e) {
        return config_error(e);
    }

    SweepSpec sweep;
    sweep.base = cfg.profile;
    sweep.parameter = cfg.sweep->parameter;
    sweep.values = cfg.sweep->values;
    sweep.pin_peak = cfg.sweep->pin_peak;
    sweep.launch = cfg.launch;
    sweep.options = cfg.options;
    sweep.threads = cfg.sweep->threads;

    SweepResult result;
    try {
        result = run_sweep(sweep);
    } catch (const std::invalid_argument& e) {
        return config_error(e);
    }

    const std::string outdir = ensure_directory(resolve_output_dir(opts, cfg.output_dir));
    CsvWriter csv(outdir + "/sweep.csv", {"swept_value", "classification", "r_min", "r_max",
                                          "width", "frequency", "status"});
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        csv.row(std::vector<std::string>{
            CsvWriter::cell(row.value), to_string(row.report.classification),
            CsvWriter::cell(row.report.r_min), CsvWriter::cell(row.report.r_max),
            CsvWriter::cell(row.report.width), CsvWriter::cell(row.report.radial_frequency),
            row.status});

        RunConfig row_cfg = cfg;
        row_cfg.profile = apply_parameter(sweep.base, sweep.parameter, row.value, sweep.pin_peak);
        row_cfg.sweep.reset();
        char name[32];
        std::snprintf(name, sizeof(name), "report_%03zu.txt", i);
        write_text_file(outdir + "/" + name,
                        report_text(row_cfg, row.report, row.launch, row.steps_accepted,
                                    row.steps_rejected));
    }
    write_text_file(outdir + "/resolved_config.toml", serialize_config(cfg));

    if (!opts.quiet)
        std::cout << "sweep: " << result.rows.size() << " rows -> " << outdir << "\n";
    return kExitOk;
}

int cmd_phase(const CommandOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_run_config(opts.config_path);
        ConfigDoc doc = ConfigDoc::parse_file(opts.config_path);
        require_valid_profile(doc, cfg.profile);
    } catch (const ConfigError& e) {
        return config_error(e);
    }

    const std::string outdir = ensure_directory(resolve_output_dir(opts, cfg.output_dir));
    const PolarState launch = resolve_launch(cfg.profile, cfg.launch);
    const ScenarioResult sc = run_polar_scenario(cfg.profile, launch, cfg.options);
    const Trajectory& traj = sc.trajectory;

    CsvWriter vel(outdir + "/velocities.csv", {"param", "r_dot", "phi_dot"});
    CsvWriter rad(outdir + "/phase_radial.csv", {"r", "r_dot"});
    CsvWriter ang(outdir + "/phase_angle.csv", {"phi_mod_2pi", "abs_r_dot"});
    const double two_pi = 2.0 * std::numbers::pi;
    const long dec = cfg.decimation;
    for (std::size_t i = 0; i < traj.knots(); ++i) {
        if (i % static_cast<std::size_t>(dec) != 0 && i + 1 != traj.knots()) continue;
        const PolarState s = polar_state(traj.knot_state(i));
        vel.row({traj.params[i], s.r_dot, s.phi_dot});
        rad.row({s.r, s.r_dot});
        double phi = std::fmod(s.phi, two_pi);
        if (phi < 0.0) phi += two_pi;
        ang.row({phi, std::abs(s.r_dot)});
    }

    if (cfg.phase && cfg.phase->energy_grid) {
        const double ell = angular_momentum(cfg.profile, launch);
        const EnergyField field = energy_ratio_field(cfg.profile, cfg.phase->r.points(),
                                                     cfg.phase->r_dot.points(), ell);
        CsvWriter grid(outdir + "/energy_grid.csv", {"r", "r_dot", "E_t"});
        for (std::size_t ir = 0; ir < field.r_values.size(); ++ir)
            for (std::size_t iv = 0; iv < field.r_dot_values.size(); ++iv)
                grid.row({field.r_values[ir], field.r_dot_values[iv], field.at(ir, iv)});
        write_text_file(outdir + "/energy_grid_meta.txt",
                        "x_c = " + format_g17(field.x_c) + "\n" +
                            "max_abs = " + format_g17(field.max_abs) + "\n");
    }
    write_text_file(outdir + "/resolved_config.toml", serialize_config(cfg));

    if (!opts.quiet)
        std::cout << "phase: " << to_string(sc.report.classification) << " -> " << outdir << "\n";
    return exit_code_for(sc.report);
}

int cmd_stability(const CommandOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_run_config(opts.config_path);
        if (!cfg.stability) {
            std::cerr << "config error: " << opts.config_path
                      << ": stability command needs a [stability] section\n";
            return kExitConfig;
        }
        ConfigDoc doc = ConfigDoc::parse_file(opts.config_path);
        require_valid_profile(doc, cfg.profile);
    } catch (const ConfigError& e) {
        return config_error(e);
    }

    const std::string outdir = ensure_directory(resolve_output_dir(opts, cfg.output_dir));
    CsvWriter csv(outdir + "/stability_map.csv",
                  {"r0", "kappa0", "beta", "V", "W", "re_lambda1", "re_lambda2", "stable"});
    for (double r0 : cfg.stability->r0.points())
        for (double kappa0 : cfg.stability->kappa0.points())
            for (double beta : cfg.stability->beta.points()) {
                const StabilityReport rep = linearize(cfg.profile, r0, kappa0, beta);
                csv.row({rep.r0, rep.kappa0, rep.beta, rep.V, rep.W, rep.lambda1.real(),
                         rep.lambda2.real(), rep.lyapunov_stable ? 1.0 : 0.0});
            }
    write_text_file(outdir + "/resolved_config.toml", serialize_config(cfg));

    if (!opts.quiet) std::cout << "stability map -> " << outdir << "\n";
    return kExitOk;
}

int cmd_validate(const CommandOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_run_config(opts.config_path);
    } catch (const ConfigError& e) {
        return config_error(e);
    }

    const ValidationReport rep = validate(cfg.profile);
    std::ostringstream oss;
    oss << "valid = " << (rep.valid ? "true" : "false") << "\n";
    oss << "n_min = " << format_g17(rep.n_min) << "\n";
    oss << "n_max = " << format_g17(rep.n_max) << "\n";
    oss << "max_abs_grad = " << format_g17(rep.max_abs_grad) << "\n";
    oss << "monotone_start = " << format_g17(rep.monotone_start) << "\n";
    oss << "grid_end = " << format_g17(rep.grid_end) << "\n";
    oss << "violations = " << rep.violations.size() << "\n";
    for (const auto& v : rep.violations)
        oss << "violation: " << v.what << " at r = " << format_g17(v.r)
            << " (n = " << format_g17(v.n) << ")\n";

    const std::string outdir = ensure_directory(resolve_output_dir(opts, cfg.output_dir));
    write_text_file(outdir + "/validation.txt", oss.str());
    if (!opts.quiet) std::cout << oss.str();
    return kExitOk;
}

}  // namespace grintrap::cli
