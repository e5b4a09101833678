#include "grintrap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "grintrap/geodesics.hpp"
#include "grintrap/numerics.hpp"
#include "grintrap/systems.hpp"

namespace grintrap {

double energy_supply_ratio(const ProfileSpec& spec, double r, double r_dot, double ell) {
    if (!(r > 0.0)) throw std::domain_error("energy_supply_ratio requires r > 0");
    const double n = eval(spec, r);
    const double n4 = n * n * n * n;
    return r_dot * (ell * ell / (n4 * r * r) - r_dot * r_dot) * chi(spec, r);
}

double critical_radius(const ProfileSpec& spec, double chi_tol) {
    // Outermost crossing of |chi| = chi_tol: scan inward from beyond the
    // profile structure, then bisect inside the last live cell.
    const double r_hi = 10.0 * spec.sigma + spec.structure_radius() + 5.0 * spec.sigma;
    constexpr int kScan = 20000;
    int last_live = -1;
    for (int i = 0; i < kScan; ++i) {
        const double r = r_hi * (i + 1) / kScan;
        if (std::abs(chi(spec, r)) >= chi_tol) last_live = i;
    }
    if (last_live < 0) return 0.0;  // gradient below tolerance everywhere
    if (last_live == kScan - 1) return r_hi;
    const double a = r_hi * (last_live + 1) / kScan;
    const double b = r_hi * (last_live + 2) / kScan;
    return bisect([&](double r) { return std::abs(chi(spec, r)) - chi_tol; }, a, b, 1e-13);
}

EnergyField energy_ratio_field(const ProfileSpec& spec, const std::vector<double>& r_grid,
                               const std::vector<double>& r_dot_grid, double ell, double chi_tol) {
    EnergyField field;
    field.r_values = r_grid;
    field.r_dot_values = r_dot_grid;
    field.values.reserve(r_grid.size() * r_dot_grid.size());
    for (double r : r_grid) {
        for (double v : r_dot_grid) {
            const double e = energy_supply_ratio(spec, r, v, ell);
            field.values.push_back(e);
            field.max_abs = std::max(field.max_abs, std::abs(e));
        }
    }
    field.x_c = critical_radius(spec, chi_tol);
    return field;
}

StabilityReport linearize(const ProfileSpec& spec, double r0, double kappa0, double beta) {
    if (!(r0 > 0.0)) throw std::domain_error("linearize requires r0 > 0");
    StabilityReport rep;
    rep.r0 = r0;
    rep.kappa0 = kappa0;
    rep.beta = beta;
    const double chi0 = chi(spec, r0);
    const double chi0p = chi_prime(spec, r0);
    rep.V = -kappa0 * chi0;
    rep.W = 2.0 * chi0 * beta * beta * r0 + chi0p * (r0 * r0 * beta * beta - kappa0 * kappa0);
    const std::complex<double> root = std::sqrt(std::complex<double>(rep.V * rep.V + rep.W, 0.0));
    rep.lambda1 = rep.V + root;
    rep.lambda2 = rep.V - root;
    rep.lyapunov_stable = std::max(rep.lambda1.real(), rep.lambda2.real()) <= 0.0;
    rep.cond_curvature = -chi0p * kappa0;
    rep.cond_discriminant = rep.V * rep.V + rep.W;
    return rep;
}

std::string to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::TrappedOpenOrbit: return "TrappedOpenOrbit";
        case OrbitClass::CircularOrbit: return "CircularOrbit";
        case OrbitClass::Escape: return "Escape";
        case OrbitClass::FellToFloor: return "FellToFloor";
        case OrbitClass::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

OrbitReport classify(const Trajectory& traj, const ProfileSpec& spec,
                     const ClassifyConfig& config) {
    OrbitReport rep;
    rep.termination = traj.termination;
    rep.horizon = traj.knots() ? traj.param_end() : 0.0;

    // ell drift and phi_dot band over the knot samples.
    double ell0 = 0.0;
    double drift = 0.0;
    double pd_lo = 0.0, pd_hi = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    for (std::size_t i = 0; i < traj.knots(); ++i) {
        const PolarState s = polar_state(traj.knot_state(i));
        const double ell = angular_momentum(spec, s);
        if (i == 0) {
            ell0 = ell;
            pd_lo = pd_hi = s.phi_dot;
            r_lo = r_hi = s.r;
        } else {
            if (ell0 != 0.0) drift = std::max(drift, std::abs(ell - ell0) / std::abs(ell0));
            else drift = std::max(drift, std::abs(ell - ell0));
            pd_lo = std::min(pd_lo, s.phi_dot);
            pd_hi = std::max(pd_hi, s.phi_dot);
            r_lo = std::min(r_lo, s.r);
            r_hi = std::max(r_hi, s.r);
        }
    }
    rep.ell_drift = drift;
    rep.phi_dot_min = pd_lo;
    rep.phi_dot_max = pd_hi;

    if (traj.termination == Termination::Singularity) {
        rep.classification = OrbitClass::FellToFloor;
        return rep;
    }
    if (traj.termination == Termination::Escape) {
        rep.classification = OrbitClass::Escape;
        rep.r_min = r_lo;
        rep.r_max = r_hi;
        return rep;
    }
    if (traj.termination == Termination::StepFailure) {
        rep.classification = OrbitClass::Undetermined;
        return rep;
    }

    const double sigma = spec.sigma;
    if (r_hi - r_lo <= config.circ_tol * sigma) {
        rep.classification = OrbitClass::CircularOrbit;
        rep.premise = 4;
        rep.r_min = r_lo;
        rep.r_max = r_hi;
        rep.width = 0.0;
        return rep;
    }

    const auto apsides = detect_apsides(
        traj, polar_idx::r, polar_idx::r_dot,
        [&spec](double, const double* y) { return rhs_polar(spec, polar_state(y)).r_ddot; },
        config.noise_floor * sigma);

    std::vector<double> minima, maxima, t_minima;
    for (const auto& ap : apsides) {
        if (ap.is_min) {
            minima.push_back(ap.r);
            t_minima.push_back(ap.param);
        } else {
            maxima.push_back(ap.r);
        }
    }

    const int pairs = static_cast<int>(std::min(minima.size(), maxima.size()));
    rep.apside_pairs = pairs;
    if (pairs >= config.n_min_pairs) {
        const auto [mn_min, mn_max] = std::minmax_element(minima.begin(), minima.end());
        const auto [mx_min, mx_max] = std::minmax_element(maxima.begin(), maxima.end());
        rep.min_band_spread = *mn_max - *mn_min;
        rep.max_band_spread = *mx_max - *mx_min;
        if (rep.min_band_spread <= config.band_tol * sigma &&
            rep.max_band_spread <= config.band_tol * sigma) {
            rep.classification = OrbitClass::TrappedOpenOrbit;
            rep.premise = 4;
            double sum = 0.0;
            for (double m : minima) sum += m;
            rep.r_min = sum / minima.size();
            sum = 0.0;
            for (double m : maxima) sum += m;
            rep.r_max = sum / maxima.size();
            rep.width = rep.r_max - rep.r_min;
            double spacing = 0.0;
            for (std::size_t i = 1; i < t_minima.size(); ++i)
                spacing += t_minima[i] - t_minima[i - 1];
            spacing /= (t_minima.size() - 1);
            rep.radial_frequency = 1.0 / spacing;
            return rep;
        }
    }

    rep.classification = OrbitClass::Undetermined;
    rep.r_min = r_lo;
    rep.r_max = r_hi;
    return rep;
}

ComparisonReport compare_profiles(const OrbitReport& a, const OrbitReport& b) {
    if (a.classification != OrbitClass::TrappedOpenOrbit ||
        b.classification != OrbitClass::TrappedOpenOrbit)
        throw std::invalid_argument("compare_profiles requires two trapped reports");
    ComparisonReport rep;
    rep.width_rel_diff = (b.width - a.width) / a.width;
    rep.frequency_rel_diff = (b.radial_frequency - a.radial_frequency) / a.radial_frequency;
    return rep;
}

std::vector<double> circular_radii(const ProfileSpec& spec, double r_max_scan) {
    if (r_max_scan <= 0.0) r_max_scan = 10.0 * spec.sigma + spec.structure_radius();
    constexpr int kScan = 8000;
    std::vector<double> roots;
    auto g = [&](double r) { return 1.0 + r * chi(spec, r); };
    double ra = r_max_scan / kScan;
    double ga = g(ra);
    for (int i = 2; i <= kScan; ++i) {
        const double rb = r_max_scan * i / kScan;
        const double gb = g(rb);
        if (ga == 0.0) roots.push_back(ra);
        else if (ga * gb < 0.0) roots.push_back(bisect(g, ra, rb, 1e-14));
        ra = rb;
        ga = gb;
    }
    return roots;
}

}  // namespace grintrap
