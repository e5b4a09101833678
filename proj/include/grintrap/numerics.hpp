#ifndef GRINTRAP_NUMERICS_HPP
#define GRINTRAP_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace grintrap {

// Bisection on [a, b] with f(a), f(b) of opposite sign. Converges to the
// absolute x tolerance; throws std::invalid_argument if the bracket is bad.
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double x_tol = 1e-14) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int it = 0; it < 200 && (b - a) > x_tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// Golden-section maximization of f on [a, b] down to the x tolerance.
inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         double x_tol = 1e-12) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > x_tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace grintrap

#endif  // GRINTRAP_NUMERICS_HPP
