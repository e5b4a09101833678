#include "grintrap/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "grintrap/numerics.hpp"
#include "grintrap/systems.hpp"

namespace grintrap {

PolarState rule_launch(const ProfileSpec& spec, double rate_fraction, double phi0) {
    const double r_hi = 10.0 * spec.sigma + spec.structure_radius();
    auto ledge = [&](double r) { return std::abs(chi(spec, r)) * r; };

    constexpr int kScan = 4000;
    int best = 1;
    double best_val = -1.0;
    for (int i = 1; i < kScan; ++i) {
        const double r = r_hi * i / kScan;
        const double v = ledge(r);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best_val <= 0.0)
        throw std::invalid_argument("launch rule: profile has no index gradient to latch onto");
    const double a = r_hi * std::max(best - 1, 1) / kScan;
    const double b = r_hi * std::min(best + 1, kScan) / kScan;
    const double r0 = golden_max(ledge, a, b, 1e-12);

    PolarState s;
    s.r = r0;
    s.phi = phi0;
    s.r_dot = 0.0;
    s.phi_dot = rate_fraction / (eval(spec, r0) * r0);
    return s;
}

PolarState resolve_launch(const ProfileSpec& spec, const LaunchSpec& launch) {
    if (launch.mode == LaunchSpec::Mode::Explicit) return launch.state;
    return rule_launch(spec, launch.rate_fraction, launch.phi0);
}

double default_escape_radius(const ProfileSpec& spec) {
    return 8.0 * spec.sigma + spec.structure_radius();
}

ScenarioResult run_polar_scenario(const ProfileSpec& spec, const PolarState& launch,
                                  const RunOptions& options) {
    ScenarioResult result;
    result.launch = launch;

    IntegratorConfig cfg = options.integrator;
    apply_polar_scales(cfg);

    const double r_esc = options.r_escape > 0.0 ? options.r_escape : default_escape_radius(spec);
    // The floor event stops the run at r_floor; the right-hand-side guard sits
    // strictly below it so the crossing stays inside the integrable domain.
    const double hard_guard = 0.5 * options.r_floor;
    std::vector<EventSpec> events;
    events.push_back(polar_apsis_event(spec, hard_guard));
    events.push_back(polar_escape_event(spec, r_esc));
    events.push_back(polar_floor_event(options.r_floor));

    const auto y0 = polar_array(launch);
    result.trajectory =
        integrate(polar_system(spec, hard_guard), polar_idx::dim, y0.data(), cfg, events);
    result.report = classify(result.trajectory, spec, options.classify);
    return result;
}

ProfileSpec apply_parameter(const ProfileSpec& base, const std::string& parameter, double value,
                            double pin_peak) {
    ProfileSpec spec = base;
    if (parameter == "n_a") spec.n_a = value;
    else if (parameter == "n_c") spec.n_c = value;
    else if (parameter == "n_d") spec.n_d = value;
    else if (parameter == "sigma") spec.sigma = value;
    else if (parameter == "r_off1") spec.r_off1 = value;
    else if (parameter == "r_off2") spec.r_off2 = value;
    else throw std::invalid_argument("unknown sweep parameter '" + parameter + "'");
    if (pin_peak > 0.0) spec.n_a = pin_peak - spec.n_c;
    return spec;
}

SweepResult run_sweep(const SweepSpec& sweep) {
    if (sweep.values.empty()) throw std::invalid_argument("sweep has no values");

    // Validate every swept profile before spending any integration time.
    std::vector<ProfileSpec> specs;
    specs.reserve(sweep.values.size());
    for (double v : sweep.values) {
        ProfileSpec s = apply_parameter(sweep.base, sweep.parameter, v, sweep.pin_peak);
        const ValidationReport rep = validate(s);
        if (!rep.valid) {
            std::ostringstream oss;
            oss << "sweep value " << sweep.parameter << " = " << v
                << " leaves the profile outside its bounds (n in [" << rep.n_min << ", "
                << rep.n_max << "])";
            throw std::invalid_argument(oss.str());
        }
        specs.push_back(std::move(s));
    }

    SweepResult result;
    result.rows.resize(sweep.values.size());

    auto run_row = [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.value = sweep.values[i];
        try {
            const PolarState launch = resolve_launch(specs[i], sweep.launch);
            ScenarioResult sc = run_polar_scenario(specs[i], launch, sweep.options);
            row.report = sc.report;
            row.launch = sc.launch;
            row.steps_accepted = sc.trajectory.steps_accepted;
            row.steps_rejected = sc.trajectory.steps_rejected;
            row.status = sc.report.termination == Termination::StepFailure
                             ? to_string(sc.report.termination)
                             : "ok";
        } catch (const std::exception& e) {
            row.status = e.what();
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = sweep.threads > 0
                                 ? static_cast<unsigned>(sweep.threads)
                                 : std::min<unsigned>(hw, static_cast<unsigned>(specs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < specs.size(); ++i) run_row(i);
    } else {
        std::vector<std::future<void>> futs;
        futs.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            futs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < specs.size(); i += workers) run_row(i);
            }));
        }
        for (auto& f : futs) f.get();
    }
    return result;
}

SensitivityReport sensitivity_probe(const ProfileSpec& spec, const LaunchSpec& launch,
                                    double delta_n, const RunOptions& options) {
    SensitivityReport rep;
    rep.delta_n = delta_n;

    const PolarState launch_state = resolve_launch(spec, launch);
    rep.baseline = run_polar_scenario(spec, launch_state, options).report;
    if (rep.baseline.classification != OrbitClass::TrappedOpenOrbit)
        throw std::invalid_argument("sensitivity_probe requires a trapped baseline");

    ProfileSpec plus = spec;
    plus.n_c += delta_n;
    ProfileSpec minus = spec;
    minus.n_c -= delta_n;

    rep.plus = run_polar_scenario(plus, launch_state, options).report;
    rep.minus = run_polar_scenario(minus, launch_state, options).report;

    rep.d_r_min_plus = rep.plus.r_min - rep.baseline.r_min;
    rep.d_r_max_plus = rep.plus.r_max - rep.baseline.r_max;
    rep.d_width_plus = rep.plus.width - rep.baseline.width;
    rep.d_frequency_plus = rep.plus.radial_frequency - rep.baseline.radial_frequency;
    rep.d_r_min_minus = rep.minus.r_min - rep.baseline.r_min;
    rep.d_r_max_minus = rep.minus.r_max - rep.baseline.r_max;
    rep.d_width_minus = rep.minus.width - rep.baseline.width;
    rep.d_frequency_minus = rep.minus.radial_frequency - rep.baseline.radial_frequency;
    rep.classification_changed_plus =
        rep.plus.classification != rep.baseline.classification;
    rep.classification_changed_minus =
        rep.minus.classification != rep.baseline.classification;
    return rep;
}

}  // namespace grintrap
