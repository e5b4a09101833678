#ifndef GRINTRAP_INTEGRATOR_HPP
#define GRINTRAP_INTEGRATOR_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace grintrap {

// Right-hand side callback on flat state arrays: dydt[i] = f_i(t, y).
using RhsFn = std::function<void(double t, const double* y, double* dydt)>;

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 10000000;
    double horizon = 0.0;       // final parameter value, > 0
    double initial_step = 0.0;  // 0 selects automatically
    double max_step = 0.0;      // 0 means unlimited
    // Components listed here use a fixed unit scale in the error norm instead
    // of their magnitude. Used for angle coordinates, whose error control must
    // not depend on the (arbitrary) angular origin.
    std::vector<int> unit_scale_components;
};

enum class Termination { Horizon, Escape, Singularity, StepFailure };

std::string to_string(Termination t);

enum class EventKind { ApsisMin, ApsisMax, Escape, Singularity, Generic };

std::string to_string(EventKind k);

struct Event {
    EventKind kind = EventKind::Generic;
    double param = 0.0;
    std::vector<double> state;
};

// A scalar event function g(t, y); a root of g along the trajectory is an
// event. Crossings are located on the dense output by bisection to parameter
// tolerance 1e-12.
struct EventSpec {
    std::string name;
    std::function<double(double, const double*)> value;
    int direction = 0;     // +1 rising, -1 falling, 0 both
    bool terminal = false;
    // Optional extra condition evaluated at the refined crossing; the crossing
    // is discarded when the gate returns false.
    std::function<bool(double, const double*)> gate;
    // Optional kind resolver evaluated at the crossing (e.g. min vs max apsis).
    std::function<EventKind(double, const double*)> classify;
    EventKind kind = EventKind::Generic;
};

// Dense solution: accepted-step knots plus the order-4 interpolant of the
// embedded pair on every interval, the located events, and the reason the
// integration ended.
class Trajectory {
  public:
    int dim = 0;
    std::vector<double> params;   // knot parameters, strictly increasing
    std::vector<double> states;   // knots * dim, row-major
    std::vector<double> derivs;   // knots * dim
    std::vector<Event> events;    // sorted by param
    Termination termination = Termination::Horizon;
    long steps_accepted = 0;
    long steps_rejected = 0;

    std::size_t knots() const { return params.size(); }
    const double* knot_state(std::size_t i) const { return states.data() + i * dim; }
    const double* knot_deriv(std::size_t i) const { return derivs.data() + i * dim; }
    double param_begin() const { return params.front(); }
    double param_end() const { return params.back(); }

    // Interpolates the state at an interior parameter value.
    void state_at(double t, double* out) const;
    std::vector<double> state_at(double t) const;

    // Interval and interpolation internals, exposed for event re-scans.
    std::size_t interval_of(double t) const;
    void interp(std::size_t interval, double t, double* out) const;

  private:
    friend class Dopri5Stepper;
    std::vector<double> dense_;    // (knots-1) * 5 * dim coefficient blocks
    std::vector<double> block_h_;  // step length per interval
};

// Adaptive embedded Runge-Kutta 5(4) integration (Dormand-Prince pair) with
// PI step-size control and dense output. Terminal events or the singularity
// guard end the trajectory early; failures are recorded, not thrown.
Trajectory integrate(const RhsFn& rhs, int dim, const double* y0, const IntegratorConfig& config,
                     const std::vector<EventSpec>& events = {});

struct ApsisEvent {
    double param = 0.0;
    double r = 0.0;
    bool is_min = false;
};

// Scans a trajectory's dense output for sign changes of the radial velocity
// component and labels each crossing min/max by the sign of the radial
// acceleration there. Crossings whose radial excursion since the previous kept
// apsis stays below noise_floor are dropped, so circular orbits report none.
std::vector<ApsisEvent> detect_apsides(const Trajectory& traj, int r_index, int r_dot_index,
                                       const std::function<double(double, const double*)>& r_ddot,
                                       double noise_floor = 1e-7);

// Fixed-step classic RK4 end state; internal reference oracle for the
// adaptive integrator, not wired to any CLI surface.
std::vector<double> reference_rk4(const RhsFn& rhs, int dim, const double* y0, double t0, double t1,
                                  double h);

}  // namespace grintrap

#endif  // GRINTRAP_INTEGRATOR_HPP
