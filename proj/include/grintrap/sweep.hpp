#ifndef GRINTRAP_SWEEP_HPP
#define GRINTRAP_SWEEP_HPP

#include <string>
#include <vector>

#include "grintrap/analysis.hpp"
#include "grintrap/geodesics.hpp"
#include "grintrap/integrator.hpp"
#include "grintrap/profiles.hpp"

namespace grintrap {

// Reproducible launch rule: start on the steepest ledge of the effective
// potential, r0 = argmax |chi(r)| * r, with r_dot0 = 0 and phi_dot0 a fixed
// fraction of the local null circular rate 1/(n(r0) r0). With r_dot0 = 0 the
// trapped band depends only on r0 (the speed factor rescales time), so the
// fraction sets the clock without moving the orbit.
struct LaunchSpec {
    enum class Mode { Explicit, Rule };
    Mode mode = Mode::Rule;
    PolarState state{};           // Mode::Explicit
    double rate_fraction = 0.9;   // Mode::Rule
    double phi0 = 0.0;
};

PolarState rule_launch(const ProfileSpec& spec, double rate_fraction = 0.9, double phi0 = 0.0);
PolarState resolve_launch(const ProfileSpec& spec, const LaunchSpec& launch);

struct RunOptions {
    IntegratorConfig integrator;  // horizon required
    double r_floor = kDefaultRadiusFloor;
    double r_escape = 0.0;        // 0 selects 8 sigma beyond the profile structure
    ClassifyConfig classify;
};

double default_escape_radius(const ProfileSpec& spec);

struct ScenarioResult {
    Trajectory trajectory;
    OrbitReport report;
    PolarState launch{};
};

// Integrates one polar scenario with apsis, escape, and floor events and
// classifies the result.
ScenarioResult run_polar_scenario(const ProfileSpec& spec, const PolarState& launch,
                                  const RunOptions& options);

struct SweepSpec {
    ProfileSpec base;
    std::string parameter;        // n_a | n_c | n_d | sigma | r_off1 | r_off2
    std::vector<double> values;
    // When > 0, n_a is re-pinned to pin_peak - n_c after each assignment so the
    // peak index stays fixed across the sweep.
    double pin_peak = 0.0;
    LaunchSpec launch;
    RunOptions options;
    int threads = 0;  // 0 selects hardware concurrency
};

struct SweepRow {
    double value = 0.0;
    OrbitReport report;
    PolarState launch{};
    long steps_accepted = 0;
    long steps_rejected = 0;
    std::string status;  // "ok" or the failure reason
};

struct SweepResult {
    std::vector<SweepRow> rows;  // one per swept value, sweep order
};

// Applies the swept parameter (and the peak pin) to a copy of the base spec.
ProfileSpec apply_parameter(const ProfileSpec& base, const std::string& parameter, double value,
                            double pin_peak = 0.0);

// Runs every swept value independently under the shared launch rule. Rows may
// execute concurrently; aggregation order and content are deterministic.
// Throws std::invalid_argument when a swept value produces an out-of-bounds
// profile or the parameter name is unknown.
SweepResult run_sweep(const SweepSpec& spec);

struct SensitivityReport {
    double delta_n = 0.0;
    OrbitReport baseline;
    OrbitReport plus;
    OrbitReport minus;
    double d_r_min_plus = 0.0, d_r_max_plus = 0.0, d_width_plus = 0.0, d_frequency_plus = 0.0;
    double d_r_min_minus = 0.0, d_r_max_minus = 0.0, d_width_minus = 0.0, d_frequency_minus = 0.0;
    bool classification_changed_plus = false;
    bool classification_changed_minus = false;
};

// Re-runs a trapped baseline with n_c perturbed by +/- delta_n, keeping the
// launch state fixed so the deltas isolate the index distortion. Throws
// std::invalid_argument when the baseline does not classify as trapped.
SensitivityReport sensitivity_probe(const ProfileSpec& spec, const LaunchSpec& launch,
                                    double delta_n, const RunOptions& options);

}  // namespace grintrap

#endif  // GRINTRAP_SWEEP_HPP
