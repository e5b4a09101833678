#ifndef GRINTRAP_SYSTEMS_HPP
#define GRINTRAP_SYSTEMS_HPP

#include <array>
#include <vector>

#include "grintrap/geodesics.hpp"
#include "grintrap/integrator.hpp"

namespace grintrap {

// Flat-state layouts used by the integrator.
//   polar:   {r, phi, r_dot, phi_dot}
//   reduced: {r, r_dot, phi}
//   eikonal: {r, phi, z, t, r_dot, phi_dot, z_dot, t_dot}
namespace polar_idx {
inline constexpr int r = 0, phi = 1, r_dot = 2, phi_dot = 3;
inline constexpr int dim = 4;
}  // namespace polar_idx
namespace reduced_idx {
inline constexpr int r = 0, r_dot = 1, phi = 2;
inline constexpr int dim = 3;
}  // namespace reduced_idx
namespace eikonal_idx {
inline constexpr int r = 0, phi = 1, z = 2, t = 3, r_dot = 4, phi_dot = 5, z_dot = 6, t_dot = 7;
inline constexpr int dim = 8;
}  // namespace eikonal_idx

inline RhsFn polar_system(const ProfileSpec& spec, double r_floor = kDefaultRadiusFloor) {
    return [spec, r_floor](double, const double* y, double* dydt) {
        const PolarState s{y[0], y[1], y[2], y[3]};
        const PolarDeriv d = rhs_polar(spec, s, r_floor);
        dydt[0] = d.r_dot;
        dydt[1] = d.phi_dot;
        dydt[2] = d.r_ddot;
        dydt[3] = d.phi_ddot;
    };
}

inline RhsFn reduced_system(const ProfileSpec& spec, double ell,
                            double r_floor = kDefaultRadiusFloor) {
    return [spec, ell, r_floor](double, const double* y, double* dydt) {
        const ReducedState s{y[0], y[1], y[2]};
        const ReducedDeriv d = rhs_reduced(spec, s, ell, r_floor);
        dydt[0] = d.r_dot;
        dydt[1] = d.r_ddot;
        dydt[2] = d.phi_dot;
    };
}

inline RhsFn eikonal_system(const ProfileSpec& spec, double r_floor = kDefaultRadiusFloor) {
    return [spec, r_floor](double, const double* y, double* dydt) {
        const EikonalState s{y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]};
        const EikonalDeriv d = rhs_eikonal(spec, s, r_floor);
        dydt[0] = d.r_dot;
        dydt[1] = d.phi_dot;
        dydt[2] = d.z_dot;
        dydt[3] = d.t_dot;
        dydt[4] = d.r_ddot;
        dydt[5] = d.phi_ddot;
        dydt[6] = d.z_ddot;
        dydt[7] = d.t_ddot;
    };
}

inline std::array<double, 4> polar_array(const PolarState& s) {
    return {s.r, s.phi, s.r_dot, s.phi_dot};
}

inline PolarState polar_state(const double* y) { return {y[0], y[1], y[2], y[3]}; }

inline std::array<double, 8> eikonal_array(const EikonalState& s) {
    return {s.r, s.phi, s.z, s.t, s.r_dot, s.phi_dot, s.z_dot, s.t_dot};
}

inline EikonalState eikonal_state(const double* y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]};
}

// Apsis event for the polar layout: r_dot crossing zero, labeled by the sign
// of the radial acceleration at the crossing.
inline EventSpec polar_apsis_event(const ProfileSpec& spec,
                                   double r_floor = kDefaultRadiusFloor) {
    EventSpec e;
    e.name = "apsis";
    e.kind = EventKind::ApsisMin;
    e.value = [](double, const double* y) { return y[polar_idx::r_dot]; };
    e.classify = [spec, r_floor](double, const double* y) {
        const PolarDeriv d = rhs_polar(spec, polar_state(y), r_floor);
        return d.r_ddot > 0.0 ? EventKind::ApsisMin : EventKind::ApsisMax;
    };
    return e;
}

// Escape: outward crossing of r_esc in the dead-gradient zone beyond the
// critical radius. An outward ray there has no restoring term left.
inline EventSpec polar_escape_event(const ProfileSpec& spec, double r_esc,
                                    double chi_dead_tol = 1e-12) {
    EventSpec e;
    e.name = "escape";
    e.kind = EventKind::Escape;
    e.terminal = true;
    e.direction = +1;
    e.value = [r_esc](double, const double* y) { return y[polar_idx::r] - r_esc; };
    e.gate = [spec, chi_dead_tol](double, const double* y) {
        return y[polar_idx::r_dot] > 0.0 && chi(spec, y[polar_idx::r]) > -chi_dead_tol;
    };
    return e;
}

inline EventSpec polar_floor_event(double r_floor = kDefaultRadiusFloor) {
    EventSpec e;
    e.name = "floor";
    e.kind = EventKind::Singularity;
    e.terminal = true;
    e.direction = -1;
    e.value = [r_floor](double, const double* y) { return y[polar_idx::r] - r_floor; };
    return e;
}

inline EventSpec eikonal_escape_event(const ProfileSpec& spec, double r_esc,
                                      double chi_dead_tol = 1e-12) {
    EventSpec e;
    e.name = "escape";
    e.kind = EventKind::Escape;
    e.terminal = true;
    e.direction = +1;
    e.value = [r_esc](double, const double* y) { return y[eikonal_idx::r] - r_esc; };
    e.gate = [spec, chi_dead_tol](double, const double* y) {
        return y[eikonal_idx::r_dot] > 0.0 && chi(spec, y[eikonal_idx::r]) > -chi_dead_tol;
    };
    return e;
}

inline EventSpec eikonal_floor_event(double r_floor = kDefaultRadiusFloor) {
    EventSpec e;
    e.name = "floor";
    e.kind = EventKind::Singularity;
    e.terminal = true;
    e.direction = -1;
    e.value = [r_floor](double, const double* y) { return y[eikonal_idx::r] - r_floor; };
    return e;
}

// Angle components use a unit error scale so step control is independent of
// the angular origin (rotational equivariance of the integration).
inline void apply_polar_scales(IntegratorConfig& cfg) {
    cfg.unit_scale_components = {polar_idx::phi};
}

inline void apply_reduced_scales(IntegratorConfig& cfg) {
    cfg.unit_scale_components = {reduced_idx::phi};
}

inline void apply_eikonal_scales(IntegratorConfig& cfg) {
    cfg.unit_scale_components = {eikonal_idx::phi, eikonal_idx::z};
}

}  // namespace grintrap

#endif  // GRINTRAP_SYSTEMS_HPP
