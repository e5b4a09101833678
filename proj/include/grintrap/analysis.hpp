#ifndef GRINTRAP_ANALYSIS_HPP
#define GRINTRAP_ANALYSIS_HPP

#include <complex>
#include <string>
#include <vector>

#include "grintrap/integrator.hpp"
#include "grintrap/profiles.hpp"

namespace grintrap {

// Instantaneous ratio of external energy supply along the reduced radial flow,
//   E_t = r_dot * (ell^2 / (n^4 r^2) - r_dot^2) * chi(r),
// evaluated exactly as written; its sign diagnoses motion toward or away from
// the dynamical equilibrium.
double energy_supply_ratio(const ProfileSpec& spec, double r, double r_dot, double ell);

struct EnergyField {
    std::vector<double> r_values;
    std::vector<double> r_dot_values;
    std::vector<double> values;  // row-major: ir * r_dot_count + iv
    double x_c = 0.0;            // critical radius: |chi| < chi_tol for all r beyond it
    double max_abs = 0.0;

    double at(std::size_t ir, std::size_t iv) const {
        return values[ir * r_dot_values.size() + iv];
    }
};

// Phase-plane grid of the energy-supply ratio plus the critical radius,
// located by scanning |chi| from the outside in and bisecting the last
// crossing of chi_tol.
EnergyField energy_ratio_field(const ProfileSpec& spec, const std::vector<double>& r_grid,
                               const std::vector<double>& r_dot_grid, double ell,
                               double chi_tol = 1e-6);

// Critical radius alone (same rule as energy_ratio_field).
double critical_radius(const ProfileSpec& spec, double chi_tol = 1e-6);

// Linearization of the reduced radial flow around (r0, kappa0) at angular rate
// beta: perturbations obey d/dt (delta, eps)^T = [[0,1],[W,2V]] (delta, eps)^T.
struct StabilityReport {
    double r0 = 0.0;
    double kappa0 = 0.0;
    double beta = 0.0;
    double V = 0.0;
    double W = 0.0;
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    bool lyapunov_stable = false;
    // Residuals of the two stability conditions; stability requires both <= 0.
    double cond_curvature = 0.0;   // -chi'(r0) * kappa0
    double cond_discriminant = 0.0;  // V^2 + W
};

StabilityReport linearize(const ProfileSpec& spec, double r0, double kappa0, double beta);

enum class OrbitClass { TrappedOpenOrbit, CircularOrbit, Escape, FellToFloor, Undetermined };

std::string to_string(OrbitClass c);

struct ClassifyConfig {
    int n_min_pairs = 10;        // apside pairs required for a trapped verdict
    double band_tol = 1e-3;      // extrema spread tolerance, units of sigma
    double circ_tol = 1e-4;      // circularity tolerance, units of sigma
    double noise_floor = 1e-7;   // apsis radial-excursion floor, units of sigma
};

struct OrbitReport {
    OrbitClass classification = OrbitClass::Undetermined;
    int premise = 0;  // trapping premise satisfied (4 here), 0 if none
    double r_min = 0.0;
    double r_max = 0.0;
    double width = 0.0;
    double radial_frequency = 0.0;  // reciprocal of the mean inter-minimum spacing
    double ell_drift = 0.0;         // max relative drift of n^2 r^2 phi_dot
    double phi_dot_min = 0.0;
    double phi_dot_max = 0.0;
    double min_band_spread = 0.0;  // spread of the periapsis radii
    double max_band_spread = 0.0;  // spread of the apoapsis radii
    int apside_pairs = 0;
    double horizon = 0.0;
    Termination termination = Termination::Horizon;
};

// Trap classification of a completed polar trajectory against the orbit
// premises. Premises 1-3 have no stationary radial realization here (premise 1
// needs a co-moving or divergent index; 2 and 3 would need angular structure),
// so the verdicts are premise-4 trapping, the circular control case, escape,
// the floor, or undetermined when the horizon was too short.
OrbitReport classify(const Trajectory& traj, const ProfileSpec& spec,
                     const ClassifyConfig& config = {});

struct ComparisonReport {
    double width_rel_diff = 0.0;      // (B - A) / A
    double frequency_rel_diff = 0.0;  // (B - A) / A
};

// Relative orbit-width and radial-frequency differences of two trapped
// reports (signed, B relative to A). Throws std::invalid_argument unless both
// are TrappedOpenOrbit.
ComparisonReport compare_profiles(const OrbitReport& a, const OrbitReport& b);

// Radii of circular orbits: roots of 1 + r * chi(r) = 0 in (0, r_max_scan],
// i.e. the radii where a tangentially launched ray feels no radial
// acceleration. Found by grid bracketing plus bisection.
std::vector<double> circular_radii(const ProfileSpec& spec, double r_max_scan = 0.0);

}  // namespace grintrap

#endif  // GRINTRAP_ANALYSIS_HPP
