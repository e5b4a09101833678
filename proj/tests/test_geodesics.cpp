#include <doctest.h>

#include <cmath>

#include "grintrap/analysis.hpp"
#include "grintrap/numerics.hpp"
#include "grintrap/sweep.hpp"
#include "grintrap/systems.hpp"
#include "oracles.hpp"

using namespace grintrap;

TEST_SUITE_BEGIN("geodesics");

TEST_CASE("polar rhs: homogeneous centrifugal limit") {
    const ProfileSpec h = ProfileSpec::homogeneous(1.0);
    const double omega = 0.3;
    const PolarDeriv d = rhs_polar(h, {2.0, 0.5, 0.0, omega});
    CHECK(d.r_ddot == doctest::Approx(2.0 * omega * omega).epsilon(1e-15));
    CHECK(d.phi_ddot == doctest::Approx(0.0));
}

TEST_CASE("polar rhs: frozen high-precision value") {
    // arbitrary-precision evaluation of the radial acceleration at
    // (r, phi, r_dot, phi_dot) = (2, 0, 0, 0.05) in the 3.0/0.8 Gaussian
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const PolarDeriv d = rhs_polar(g, {2.0, 0.0, 0.0, 0.05});
    CHECK(d.r_ddot == doctest::Approx(0.002429224407032723417443022).epsilon(1e-14));
    CHECK(d.phi_ddot == 0.0);  // every angular term carries r_dot
}

TEST_CASE("polar rhs: no angular acceleration without angular rate") {
    for (const auto& spec : {ProfileSpec::gaussian(3.0, 0.8),
                             ProfileSpec::mexican_hat(3.0, 0.2, 0.8)}) {
        const PolarDeriv d = rhs_polar(spec, {1.4, 1.0, 0.2, 0.0});
        CHECK(d.phi_ddot == 0.0);
    }
}

TEST_CASE("polar rhs: singularity guard") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    CHECK_THROWS_AS(rhs_polar(g, {1e-10, 0.0, 0.0, 0.1}), SingularityError);
}

TEST_CASE("reduced rhs: homogeneous centrifugal form") {
    const ProfileSpec h = ProfileSpec::homogeneous(1.3);
    const double r0 = 2.0, omega = 0.1;
    const double nc2 = 1.3 * 1.3;
    const double ell = nc2 * r0 * r0 * omega;
    for (double r : {0.7, 1.5, 3.0}) {
        const ReducedDeriv d = rhs_reduced(h, {r, 0.2, 0.0}, ell);
        CHECK(d.r_ddot ==
              doctest::Approx(ell * ell / (nc2 * nc2 * r * r * r)).epsilon(1e-14));
        CHECK(d.phi_dot == doctest::Approx(ell / (nc2 * r * r)).epsilon(1e-14));
    }
}

TEST_CASE("reduced rhs agrees with polar rhs under the ell substitution") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const double r = 1.5, r_dot = 0.1;
    const PolarState launch = rule_launch(g);
    const double ell = angular_momentum(g, launch);
    const double n = eval(g, r);
    const double phi_dot = ell / (n * n * r * r);
    const PolarDeriv dp = rhs_polar(g, {r, 0.3, r_dot, phi_dot});
    const ReducedDeriv dr = rhs_reduced(g, {r, r_dot, 0.3}, ell);
    CHECK(dr.r_ddot == doctest::Approx(dp.r_ddot).epsilon(1e-12));
}

TEST_CASE("reduced rhs: circular radius root has no radial acceleration") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const auto roots = circular_radii(g);
    REQUIRE(roots.size() == 2);
    for (double rc : roots) {
        const double ell = 0.7;  // any angular constant
        const ReducedDeriv d = rhs_reduced(g, {rc, 0.0, 0.0}, ell);
        CHECK(std::abs(d.r_ddot) < 1e-12);
    }
}

TEST_CASE("eikonal rhs: planar launch stays planar, homogeneous keeps t_dot") {
    const ProfileSpec h = ProfileSpec::homogeneous(1.0);
    EikonalState s{2.0, 0.1, 0.0, 0.0, 0.3, 0.05, 0.0, 0.0};
    s.t_dot = eval(h, s.r) * std::sqrt(s.r_dot * s.r_dot + s.r * s.r * s.phi_dot * s.phi_dot);
    const EikonalDeriv d = rhs_eikonal(h, s);
    CHECK(d.z_ddot == 0.0);
    CHECK(d.t_ddot == 0.0);

    IntegratorConfig cfg;
    cfg.horizon = 20.0;
    apply_eikonal_scales(cfg);
    const auto y0 = eikonal_array(s);
    const Trajectory traj = integrate(eikonal_system(h), eikonal_idx::dim, y0.data(), cfg);
    for (std::size_t i = 0; i < traj.knots(); ++i) {
        CHECK(traj.knot_state(i)[eikonal_idx::z] == 0.0);
        CHECK(traj.knot_state(i)[eikonal_idx::z_dot] == 0.0);
        CHECK(traj.knot_state(i)[eikonal_idx::t_dot] ==
              doctest::Approx(s.t_dot).epsilon(1e-12));
    }
}

TEST_CASE("null constraint vanishes for a normalized launch") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const PolarState p{1.3, 0.0, 0.1, 0.4};
    const EikonalState e = eikonal_launch_from_polar(g, p);
    CHECK(std::abs(null_constraint(g, e)) < 1e-15);
}

TEST_CASE("angular momentum basics") {
    const ProfileSpec h = ProfileSpec::homogeneous(1.0);
    CHECK(angular_momentum(h, {2.0, 0.0, 0.5, 0.0}) == 0.0);
    CHECK(angular_momentum(h, {2.0, 0.0, 0.0, 0.1}) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("ell is conserved along a trapped polar trajectory") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const PolarState launch = rule_launch(g);
    const double ell0 = angular_momentum(g, launch);

    IntegratorConfig cfg;
    cfg.horizon = 120.0;
    apply_polar_scales(cfg);
    const auto y0 = polar_array(launch);
    const Trajectory traj = integrate(polar_system(g), polar_idx::dim, y0.data(), cfg);
    REQUIRE(traj.termination == Termination::Horizon);
    double drift = 0.0;
    for (std::size_t i = 0; i < traj.knots(); ++i) {
        const double ell = angular_momentum(g, polar_state(traj.knot_state(i)));
        drift = std::max(drift, std::abs(ell - ell0) / std::abs(ell0));
    }
    CHECK(drift <= 1e-8);
}

TEST_CASE("optical speed invariant n^2 v^2 is conserved by the polar flow") {
    const ProfileSpec g = ProfileSpec::gaussian(3.3, 0.5);
    const PolarState launch = rule_launch(g);
    IntegratorConfig cfg;
    cfg.horizon = 60.0;
    apply_polar_scales(cfg);
    const auto y0 = polar_array(launch);
    const Trajectory traj = integrate(polar_system(g), polar_idx::dim, y0.data(), cfg);
    auto speed_inv = [&](const PolarState& s) {
        const double n = eval(g, s.r);
        return n * n * (s.r_dot * s.r_dot + s.r * s.r * s.phi_dot * s.phi_dot);
    };
    const double s0 = speed_inv(launch);
    for (std::size_t i = 0; i < traj.knots(); ++i)
        CHECK(speed_inv(polar_state(traj.knot_state(i))) ==
              doctest::Approx(s0).epsilon(1e-8));
}

TEST_CASE("time reversal returns to the launch state") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const PolarState launch = rule_launch(g);
    IntegratorConfig cfg;
    cfg.horizon = 25.0;
    apply_polar_scales(cfg);
    auto y0 = polar_array(launch);
    const Trajectory fwd = integrate(polar_system(g), polar_idx::dim, y0.data(), cfg);
    REQUIRE(fwd.termination == Termination::Horizon);

    PolarState end = polar_state(fwd.knot_state(fwd.knots() - 1));
    end.r_dot = -end.r_dot;
    end.phi_dot = -end.phi_dot;
    const auto y1 = polar_array(end);
    const Trajectory back = integrate(polar_system(g), polar_idx::dim, y1.data(), cfg);
    const PolarState ret = polar_state(back.knot_state(back.knots() - 1));
    CHECK(ret.r == doctest::Approx(launch.r).epsilon(1e-6));
    CHECK(-ret.r_dot == doctest::Approx(launch.r_dot).epsilon(1e-6).scale(1.0));
    CHECK(-ret.phi_dot == doctest::Approx(launch.phi_dot).epsilon(1e-6));
    CHECK(ret.phi == doctest::Approx(launch.phi).epsilon(1e-6).scale(1.0));
}

TEST_CASE("rotational equivariance: launch angle shifts the whole path") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    PolarState a = rule_launch(g);
    PolarState b = a;
    const double dphi = 1.5707963267948966;  // pi/2, exactly representable shift
    b.phi += dphi;

    IntegratorConfig cfg;
    cfg.horizon = 40.0;
    apply_polar_scales(cfg);
    const auto ya = polar_array(a);
    const auto yb = polar_array(b);
    const Trajectory ta = integrate(polar_system(g), polar_idx::dim, ya.data(), cfg);
    const Trajectory tb = integrate(polar_system(g), polar_idx::dim, yb.data(), cfg);
    REQUIRE(ta.knots() == tb.knots());
    for (std::size_t i = 0; i < ta.knots(); ++i) {
        CHECK(ta.params[i] == tb.params[i]);  // identical step decisions
        CHECK(ta.knot_state(i)[polar_idx::r] == tb.knot_state(i)[polar_idx::r]);
        CHECK(ta.knot_state(i)[polar_idx::r_dot] == tb.knot_state(i)[polar_idx::r_dot]);
        CHECK(ta.knot_state(i)[polar_idx::phi_dot] == tb.knot_state(i)[polar_idx::phi_dot]);
        CHECK(std::abs(tb.knot_state(i)[polar_idx::phi] - ta.knot_state(i)[polar_idx::phi] -
                       dphi) < 1e-10);
    }
}

TEST_CASE("eikonal trajectory reparameterized by t matches the polar one") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    // null-normalized polar launch: tangential at light speed 1/n
    PolarState launch = rule_launch(g, 1.0);

    IntegratorConfig pc;
    pc.horizon = 30.0;
    apply_polar_scales(pc);
    const auto yp = polar_array(launch);
    const Trajectory polar = integrate(polar_system(g), polar_idx::dim, yp.data(), pc);

    const EikonalState es = eikonal_launch_from_polar(g, launch);
    IntegratorConfig ec;
    ec.horizon = 45.0;  // tau horizon; t(tau) grows like n v tau
    apply_eikonal_scales(ec);
    const auto ye = eikonal_array(es);
    const Trajectory eik = integrate(eikonal_system(g), eikonal_idx::dim, ye.data(), ec);

    // invert t(tau) by bisection on the dense output
    auto tau_of_t = [&](double t_want) {
        std::size_t lo = 0, hi = eik.knots() - 1;
        REQUIRE(eik.knot_state(hi)[eikonal_idx::t] >= t_want);
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (eik.knot_state(mid)[eikonal_idx::t] < t_want) lo = mid;
            else hi = mid;
        }
        double a = eik.params[lo], b = eik.params[hi];
        std::vector<double> ys(eikonal_idx::dim);
        for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
            const double m = 0.5 * (a + b);
            eik.state_at(m, ys.data());
            if (ys[eikonal_idx::t] < t_want) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };

    const double t_max = std::min(polar.param_end(),
                                  eik.knot_state(eik.knots() - 1)[eikonal_idx::t]) * 0.98;
    std::vector<double> yp_s(polar_idx::dim), ye_s(eikonal_idx::dim);
    for (int k = 1; k <= 60; ++k) {
        const double t = t_max * k / 60.0;
        polar.state_at(t, yp_s.data());
        eik.state_at(tau_of_t(t), ye_s.data());
        CHECK(std::abs(yp_s[polar_idx::r] - ye_s[eikonal_idx::r]) < 1e-6);
        CHECK(std::abs(yp_s[polar_idx::phi] - ye_s[eikonal_idx::phi]) < 1e-6);
    }
}

TEST_CASE("null constraint drift stays small over many radial periods") {
    const ProfileSpec g = ProfileSpec::gaussian(3.0, 0.8);
    const PolarState launch = rule_launch(g, 1.0);
    const EikonalState es = eikonal_launch_from_polar(g, launch);
    IntegratorConfig ec;
    ec.horizon = 400.0;  // tau; roughly 20 radial periods after reparameterization
    apply_eikonal_scales(ec);
    const auto ye = eikonal_array(es);
    const Trajectory eik = integrate(eikonal_system(g), eikonal_idx::dim, ye.data(), ec);
    REQUIRE(eik.termination == Termination::Horizon);
    double worst = 0.0;
    for (std::size_t i = 0; i < eik.knots(); ++i)
        worst = std::max(worst,
                         std::abs(null_constraint(g, eikonal_state(eik.knot_state(i)))));
    CHECK(worst <= 1e-7);
}

TEST_SUITE_END();
