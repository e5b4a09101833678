#ifndef GRINTRAP_PROFILES_HPP
#define GRINTRAP_PROFILES_HPP

#include <string>
#include <vector>

namespace grintrap {

enum class ProfileKind { Gaussian, MexicanHat, DoubleGaussian, Homogeneous };

std::string to_string(ProfileKind kind);

// Admissible refractive-index range. The defaults reflect what is feasible
// with photorefractive [meta]material stacks.
struct IndexBounds {
    double lo = 0.8;
    double hi = 3.8;
};

// Parametric centro-symmetric refractive-index map n(r). Immutable after
// construction; safe to share across threads.
struct ProfileSpec {
    ProfileKind kind = ProfileKind::Gaussian;
    double n_a = 3.0;     // peak amplitude
    double n_c = 0.8;     // background index
    double n_d = 0.0;     // depression amplitude (MexicanHat only)
    double sigma = 1.0;   // length scale; radii are naturally expressed in units of sigma
    double r_off1 = 0.0;  // radial lobe offsets (DoubleGaussian only)
    double r_off2 = 0.0;
    IndexBounds bounds{};

    static ProfileSpec gaussian(double n_a, double n_c, double sigma = 1.0);
    static ProfileSpec mexican_hat(double n_a, double n_d, double n_c, double sigma = 1.0);
    static ProfileSpec double_gaussian(double n_a, double n_c, double r_off1, double r_off2,
                                       double sigma = 1.0);
    static ProfileSpec homogeneous(double n_c);

    // Outermost radius at which the profile still has structure (max lobe offset);
    // 0 for centered families.
    double structure_radius() const;
};

// Closed-form index value n(r). Throws std::domain_error on r < 0 or NaN.
double eval(const ProfileSpec& spec, double r);

// Analytic first and second radial derivatives of eval. No finite differences.
double grad(const ProfileSpec& spec, double r);
double grad2(const ProfileSpec& spec, double r);

// Logarithmic-derivative field chi(r) = d/dr ln n and its radial derivative.
// Finite for all r >= 0 because n is bounded away from zero.
double chi(const ProfileSpec& spec, double r);
double chi_prime(const ProfileSpec& spec, double r);

struct BoundsViolation {
    double r = 0.0;
    double n = 0.0;
    std::string what;  // "below lower bound" / "above upper bound" / "sigma"
};

struct ValidationReport {
    bool valid = false;
    std::vector<BoundsViolation> violations;
    double n_min = 0.0;
    double n_max = 0.0;
    double max_abs_grad = 0.0;
    double argmax_radius = 0.0;  // grid radius of the profile maximum
    // Maximal trailing interval [monotone_start, grid_end] on which n is
    // non-increasing; the stability analysis assumes orbits live inside it.
    double monotone_start = 0.0;
    double grid_end = 0.0;
};

// Grid check of sigma > 0 and bounds compliance on r in [0, 10 sigma] (extended
// past lobe offsets), 1e4 points. Reports violations; never throws.
// Bound comparisons carry a 1e-6 slack so superposition tails that graze a
// pinned peak are not flagged.
ValidationReport validate(const ProfileSpec& spec);

}  // namespace grintrap

#endif  // GRINTRAP_PROFILES_HPP
