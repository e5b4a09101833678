#include "grintrap/geodesics.hpp"

#include <cmath>

namespace grintrap {

namespace {

void guard_radius(double r, double r_floor) {
    if (!(r > r_floor)) throw SingularityError(r);
}

}  // namespace

PolarDeriv rhs_polar(const ProfileSpec& spec, const PolarState& s, double r_floor) {
    guard_radius(s.r, r_floor);
    const double n = eval(spec, s.r);
    const double nr = grad(spec, s.r);
    const double nphi = dn_dphi(spec, s.r, s.phi);
    const double r = s.r;
    const double rd = s.r_dot;
    const double pd = s.phi_dot;

    PolarDeriv d;
    d.r_dot = rd;
    d.phi_dot = pd;
    d.r_ddot = (n * r * pd * pd - 2.0 * rd * pd * nphi - rd * rd * nr + r * r * pd * pd * nr) / n;
    d.phi_ddot = -(2.0 * n * r * rd * pd - rd * rd * nphi + r * r * pd * pd * nphi +
                   2.0 * r * r * rd * pd * nr) /
                 (n * r * r);
    return d;
}

ReducedDeriv rhs_reduced(const ProfileSpec& spec, const ReducedState& s, double ell,
                         double r_floor) {
    guard_radius(s.r, r_floor);
    const double n = eval(spec, s.r);
    const double x = chi(spec, s.r);
    const double r = s.r;
    const double n2 = n * n;
    const double l_over = ell / (n2 * r * r);  // = phi_dot

    ReducedDeriv d;
    d.r_dot = s.r_dot;
    d.r_ddot = (l_over * l_over * r * r - s.r_dot * s.r_dot) * x + l_over * l_over * r;
    d.phi_dot = l_over;
    return d;
}

EikonalDeriv rhs_eikonal(const ProfileSpec& spec, const EikonalState& s, double r_floor) {
    guard_radius(s.r, r_floor);
    const double n = eval(spec, s.r);
    const double nr = grad(spec, s.r);
    const double nphi = dn_dphi(spec, s.r, s.phi);
    const double nz = dn_dz(spec, s.r, s.phi);
    const double nt = dn_dt(spec, s.r, s.phi);
    const double n3 = n * n * n;
    const double r = s.r;

    EikonalDeriv d;
    d.r_dot = s.r_dot;
    d.phi_dot = s.phi_dot;
    d.z_dot = s.z_dot;
    d.t_dot = s.t_dot;
    d.r_ddot = r * s.phi_dot * s.phi_dot + s.t_dot * s.t_dot * nr / n3;
    d.phi_ddot = (-2.0 * r * s.r_dot * s.phi_dot + s.t_dot * s.t_dot * nphi / n3) / (r * r);
    d.z_ddot = s.t_dot * s.t_dot * nz / n3;
    d.t_ddot = s.t_dot *
               (s.t_dot * nt +
                2.0 * (s.z_dot * nz + s.phi_dot * nphi + s.r_dot * nr)) /
               n;
    return d;
}

double angular_momentum(const ProfileSpec& spec, const PolarState& s) {
    if (!(s.r > 0.0)) throw std::domain_error("angular_momentum requires r > 0");
    const double n = eval(spec, s.r);
    return n * n * s.r * s.r * s.phi_dot;
}

double null_constraint(const ProfileSpec& spec, const EikonalState& s) {
    if (!(s.r > 0.0)) throw std::domain_error("null_constraint requires r > 0");
    const double n = eval(spec, s.r);
    return s.t_dot * s.t_dot / (n * n) - s.r_dot * s.r_dot - s.r * s.r * s.phi_dot * s.phi_dot -
           s.z_dot * s.z_dot;
}

EikonalState eikonal_launch_from_polar(const ProfileSpec& spec, const PolarState& s) {
    const double n = eval(spec, s.r);
    const double v = std::sqrt(s.r_dot * s.r_dot + s.r * s.r * s.phi_dot * s.phi_dot);
    EikonalState e;
    e.r = s.r;
    e.phi = s.phi;
    e.z = 0.0;
    e.t = 0.0;
    e.r_dot = s.r_dot;
    e.phi_dot = s.phi_dot;
    e.z_dot = 0.0;
    e.t_dot = n * v;
    return e;
}

}  // namespace grintrap
