#include "grintrap/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grintrap {

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Gaussian: return "gaussian";
        case ProfileKind::MexicanHat: return "mexican_hat";
        case ProfileKind::DoubleGaussian: return "double_gaussian";
        case ProfileKind::Homogeneous: return "homogeneous";
    }
    return "unknown";
}

ProfileSpec ProfileSpec::gaussian(double n_a, double n_c, double sigma) {
    ProfileSpec s;
    s.kind = ProfileKind::Gaussian;
    s.n_a = n_a;
    s.n_c = n_c;
    s.sigma = sigma;
    return s;
}

ProfileSpec ProfileSpec::mexican_hat(double n_a, double n_d, double n_c, double sigma) {
    ProfileSpec s;
    s.kind = ProfileKind::MexicanHat;
    s.n_a = n_a;
    s.n_d = n_d;
    s.n_c = n_c;
    s.sigma = sigma;
    return s;
}

ProfileSpec ProfileSpec::double_gaussian(double n_a, double n_c, double r_off1, double r_off2,
                                         double sigma) {
    ProfileSpec s;
    s.kind = ProfileKind::DoubleGaussian;
    s.n_a = n_a;
    s.n_c = n_c;
    s.r_off1 = r_off1;
    s.r_off2 = r_off2;
    s.sigma = sigma;
    return s;
}

ProfileSpec ProfileSpec::homogeneous(double n_c) {
    ProfileSpec s;
    s.kind = ProfileKind::Homogeneous;
    s.n_a = 0.0;
    s.n_c = n_c;
    return s;
}

double ProfileSpec::structure_radius() const {
    if (kind == ProfileKind::DoubleGaussian) return std::max({0.0, r_off1, r_off2});
    return 0.0;
}

namespace {

void check_radius(double r) {
    if (std::isnan(r) || r < 0.0) throw std::domain_error("profile evaluated at invalid radius");
}

}  // namespace

double eval(const ProfileSpec& spec, double r) {
    check_radius(r);
    const double s2 = spec.sigma * spec.sigma;
    switch (spec.kind) {
        case ProfileKind::Gaussian:
            return spec.n_a * std::exp(-r * r / s2) + spec.n_c;
        case ProfileKind::MexicanHat: {
            const double u = r * r / s2;
            return (spec.n_a - spec.n_d * u) * std::exp(-u) + spec.n_c;
        }
        case ProfileKind::DoubleGaussian: {
            const double d1 = r - spec.r_off1;
            const double d2 = r - spec.r_off2;
            return spec.n_a * (std::exp(-d1 * d1 / s2) + std::exp(-d2 * d2 / s2)) + spec.n_c;
        }
        case ProfileKind::Homogeneous:
            return spec.n_c;
    }
    return spec.n_c;
}

double grad(const ProfileSpec& spec, double r) {
    check_radius(r);
    const double s2 = spec.sigma * spec.sigma;
    switch (spec.kind) {
        case ProfileKind::Gaussian:
            return -2.0 * r / s2 * spec.n_a * std::exp(-r * r / s2);
        case ProfileKind::MexicanHat: {
            const double u = r * r / s2;
            return -2.0 * r / s2 * std::exp(-u) * (spec.n_a + spec.n_d - spec.n_d * u);
        }
        case ProfileKind::DoubleGaussian: {
            const double d1 = r - spec.r_off1;
            const double d2 = r - spec.r_off2;
            return spec.n_a * (-2.0 * d1 / s2 * std::exp(-d1 * d1 / s2) +
                               -2.0 * d2 / s2 * std::exp(-d2 * d2 / s2));
        }
        case ProfileKind::Homogeneous:
            return 0.0;
    }
    return 0.0;
}

double grad2(const ProfileSpec& spec, double r) {
    check_radius(r);
    const double s2 = spec.sigma * spec.sigma;
    switch (spec.kind) {
        case ProfileKind::Gaussian: {
            const double u = r * r / s2;
            return spec.n_a * std::exp(-u) * (4.0 * u - 2.0) / s2;
        }
        case ProfileKind::MexicanHat: {
            const double u = r * r / s2;
            const double a = spec.n_a + spec.n_d - spec.n_d * u;
            return std::exp(-u) / s2 * (-2.0 * a + 4.0 * u * (a + spec.n_d));
        }
        case ProfileKind::DoubleGaussian: {
            const double d1 = r - spec.r_off1;
            const double d2 = r - spec.r_off2;
            const double u1 = d1 * d1 / s2;
            const double u2 = d2 * d2 / s2;
            return spec.n_a / s2 *
                   (std::exp(-u1) * (4.0 * u1 - 2.0) + std::exp(-u2) * (4.0 * u2 - 2.0));
        }
        case ProfileKind::Homogeneous:
            return 0.0;
    }
    return 0.0;
}

double chi(const ProfileSpec& spec, double r) {
    return grad(spec, r) / eval(spec, r);
}

double chi_prime(const ProfileSpec& spec, double r) {
    const double n = eval(spec, r);
    const double g = grad(spec, r) / n;
    return grad2(spec, r) / n - g * g;
}

ValidationReport validate(const ProfileSpec& spec) {
    ValidationReport rep;
    if (!(spec.sigma > 0.0) || std::isnan(spec.sigma)) {
        rep.violations.push_back({0.0, 0.0, "sigma must be positive"});
        rep.valid = false;
        return rep;
    }

    constexpr int kGridPoints = 10000;
    constexpr double kBoundSlack = 1e-6;
    const double r_end = 10.0 * spec.sigma + spec.structure_radius();
    rep.grid_end = r_end;

    double n_min = eval(spec, 0.0);
    double n_max = n_min;
    double max_abs_grad = 0.0;
    double last_increasing_r = 0.0;
    double argmax_r = 0.0;
    const double grad_tol = 1e-12;

    for (int i = 0; i < kGridPoints; ++i) {
        const double r = r_end * static_cast<double>(i) / (kGridPoints - 1);
        const double n = eval(spec, r);
        const double dn = grad(spec, r);
        n_min = std::min(n_min, n);
        if (n > n_max) {
            n_max = n;
            argmax_r = r;
        }
        max_abs_grad = std::max(max_abs_grad, std::abs(dn));
        if (dn > grad_tol) last_increasing_r = r;
        if (n < spec.bounds.lo - kBoundSlack)
            rep.violations.push_back({r, n, "below lower bound"});
        if (n > spec.bounds.hi + kBoundSlack)
            rep.violations.push_back({r, n, "above upper bound"});
    }

    rep.n_min = n_min;
    rep.n_max = n_max;
    rep.max_abs_grad = max_abs_grad;
    rep.argmax_radius = argmax_r;
    rep.monotone_start = last_increasing_r;
    rep.valid = rep.violations.empty();
    return rep;
}

}  // namespace grintrap
