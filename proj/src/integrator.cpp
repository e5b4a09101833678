#include "grintrap/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "grintrap/geodesics.hpp"  // SingularityError

namespace grintrap {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Horizon: return "horizon";
        case Termination::Escape: return "escape";
        case Termination::Singularity: return "singularity";
        case Termination::StepFailure: return "step-failure";
    }
    return "unknown";
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::ApsisMin: return "apsis_min";
        case EventKind::ApsisMax: return "apsis_max";
        case EventKind::Escape: return "escape";
        case EventKind::Singularity: return "singularity";
        case EventKind::Generic: return "event";
    }
    return "unknown";
}

namespace {

// Dormand-Prince RK5(4)7M coefficients (1980 JCoAM 6 19) with the 4th-order
// dense-output weights from Hairer/Norsett/Wanner, Solving ODEs I.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b5 - b4, for the embedded error estimate
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kEventParamTol = 1e-12;
constexpr double kEventDedupe = 1e-9;

}  // namespace

void Trajectory::state_at(double t, double* out) const {
    interp(interval_of(t), t, out);
}

std::vector<double> Trajectory::state_at(double t) const {
    std::vector<double> out(dim);
    state_at(t, out.data());
    return out;
}

std::size_t Trajectory::interval_of(double t) const {
    const auto it = std::upper_bound(params.begin(), params.end(), t);
    std::size_t i = (it == params.begin()) ? 0 : static_cast<std::size_t>(it - params.begin()) - 1;
    if (i >= block_h_.size()) i = block_h_.empty() ? 0 : block_h_.size() - 1;
    return i;
}

void Trajectory::interp(std::size_t interval, double t, double* out) const {
    if (block_h_.empty()) {  // single-knot trajectory
        std::memcpy(out, states.data(), sizeof(double) * dim);
        return;
    }
    const double* rc = dense_.data() + interval * 5 * dim;
    const double theta = (t - params[interval]) / block_h_[interval];
    const double theta1 = 1.0 - theta;
    for (int i = 0; i < dim; ++i) {
        out[i] = rc[i] +
                 theta * (rc[dim + i] +
                          theta1 * (rc[2 * dim + i] +
                                    theta * (rc[3 * dim + i] + theta1 * rc[4 * dim + i])));
    }
}

class Dopri5Stepper {
  public:
    Dopri5Stepper(const RhsFn& rhs, int dim, const double* y0, const IntegratorConfig& cfg,
                  const std::vector<EventSpec>& events)
        : rhs_(rhs), cfg_(cfg), events_(events), dim_(dim) {
        traj_.dim = dim;
        unit_scale_.assign(dim, 0);
        for (int c : cfg.unit_scale_components)
            if (c >= 0 && c < dim) unit_scale_[c] = 1;
        y_.assign(y0, y0 + dim);
        for (auto& v : work_) v.resize(dim);
        last_event_param_.assign(events.size(), -std::numeric_limits<double>::infinity());
    }

    Trajectory run() {
        double t = 0.0;
        const double t_end = cfg_.horizon;
        try {
            rhs_(t, y_.data(), work_[0].data());  // k1
        } catch (const SingularityError&) {
            push_knot(t, y_.data(), nullptr);
            traj_.termination = Termination::Singularity;
            return std::move(traj_);
        }
        push_knot(t, y_.data(), work_[0].data());

        double h = cfg_.initial_step > 0.0 ? cfg_.initial_step : guess_initial_step(t);
        bool last_rejected = false;

        for (long step = 0; step < cfg_.max_steps; ++step) {
            if (t >= t_end) break;
            if (cfg_.max_step > 0.0) h = std::min(h, cfg_.max_step);
            bool last_step = false;
            if (h >= t_end - t) {
                h = t_end - t;
                last_step = true;
            }
            if (!(h > std::abs(t) * 1e-15 + 1e-300)) {
                // step size driven to zero against the radius guard means the
                // ray ran into the singularity, not a controller failure
                traj_.termination = last_reject_singular_ ? Termination::Singularity
                                                          : Termination::StepFailure;
                return std::move(traj_);
            }

            bool singular = false;
            const double err = attempt_step(t, h, singular);
            last_reject_singular_ = singular;
            if (singular) {
                h *= 0.5;
                ++traj_.steps_rejected;
                last_rejected = true;
                continue;
            }

            constexpr double beta = 0.04;
            constexpr double expo1 = 0.2 - beta * 0.75;
            constexpr double safe = 0.9;
            constexpr double facc1 = 5.0;   // max shrink factor
            constexpr double facc2 = 0.1;   // max growth is 1/facc2
            const double fac11 = std::pow(std::max(err, 1e-32), expo1);

            if (err <= 1.0) {
                // accepted
                double fac = fac11 / std::pow(facold_, beta);
                facold_ = std::max(err, 1e-4);
                fac = std::max(facc2, std::min(facc1, fac / safe));
                double hnew = h / fac;
                if (last_rejected) hnew = std::min(hnew, h);
                last_rejected = false;

                const double t_new = last_step ? t_end : t + h;
                push_knot_with_dense(t_new, h);
                ++traj_.steps_accepted;

                if (process_events()) return std::move(traj_);

                t = t_new;
                y_ = ynew_;
                work_[0] = k7_;  // FSAL
                h = hnew;
            } else {
                h = h / std::min(facc1, fac11 / safe);
                ++traj_.steps_rejected;
                last_rejected = true;
            }
        }

        if (t < t_end) traj_.termination = Termination::StepFailure;
        return std::move(traj_);
    }

  private:
    double error_scale(int i, double yi, double yni) const {
        const double ref = unit_scale_[i] ? 1.0 : std::max(std::abs(yi), std::abs(yni));
        return cfg_.abs_tol + cfg_.rel_tol * ref;
    }

    // One trial step from (t, y_) with size h. Returns the scaled error norm
    // and fills ynew_, k7_ and the stage array. Flags singular when a stage
    // lands below the radius floor.
    double attempt_step(double t, double h, bool& singular) {
        auto& k1 = work_[0];
        auto& k2 = work_[1];
        auto& k3 = work_[2];
        auto& k4 = work_[3];
        auto& k5 = work_[4];
        auto& k6 = work_[5];
        auto& tmp = work_[6];
        ynew_.resize(dim_);
        k7_.resize(dim_);
        singular = false;
        try {
            for (int i = 0; i < dim_; ++i) tmp[i] = y_[i] + h * a21 * k1[i];
            rhs_(t + c2 * h, tmp.data(), k2.data());
            for (int i = 0; i < dim_; ++i) tmp[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
            rhs_(t + c3 * h, tmp.data(), k3.data());
            for (int i = 0; i < dim_; ++i)
                tmp[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            rhs_(t + c4 * h, tmp.data(), k4.data());
            for (int i = 0; i < dim_; ++i)
                tmp[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs_(t + c5 * h, tmp.data(), k5.data());
            for (int i = 0; i < dim_; ++i)
                tmp[i] = y_[i] +
                         h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            rhs_(t + h, tmp.data(), k6.data());
            for (int i = 0; i < dim_; ++i)
                ynew_[i] = y_[i] +
                           h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            rhs_(t + h, ynew_.data(), k7_.data());
        } catch (const SingularityError&) {
            singular = true;
            return 2.0;
        }

        double err_sq = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                   e7 * k7_[i]);
            const double sc = error_scale(i, y_[i], ynew_[i]);
            err_sq += (ei / sc) * (ei / sc);
        }
        if (!std::isfinite(err_sq)) return 2.0;
        return std::sqrt(err_sq / dim_);
    }

    double guess_initial_step(double t) {
        // Hairer's hinit, with the stage guarded against the radius floor.
        const auto& f0 = work_[0];
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double sc = error_scale(i, y_[i], y_[i]);
            dnf += (f0[i] / sc) * (f0[i] / sc);
            // translation-invariant components must not influence the step
            // scale, or integrations would depend on the angular origin
            if (!unit_scale_[i]) dny += (y_[i] / sc) * (y_[i] / sc);
        }
        double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h0 = std::min(h0, cfg_.horizon);
        auto& tmp = work_[6];
        auto& f1 = work_[1];
        double der2 = 0.0;
        try {
            for (int i = 0; i < dim_; ++i) tmp[i] = y_[i] + h0 * f0[i];
            rhs_(t + h0, tmp.data(), f1.data());
            for (int i = 0; i < dim_; ++i) {
                const double sc = error_scale(i, y_[i], y_[i]);
                const double d = (f1[i] - f0[i]) / sc;
                der2 += d * d;
            }
            der2 = std::sqrt(der2) / h0;
        } catch (const SingularityError&) {
            return std::min(1e-6, cfg_.horizon);
        }
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                           : std::pow(0.01 / der12, 0.2);
        return std::min({100.0 * h0, h1, cfg_.horizon});
    }

    void push_knot(double t, const double* y, const double* f) {
        traj_.params.push_back(t);
        traj_.states.insert(traj_.states.end(), y, y + dim_);
        if (f)
            traj_.derivs.insert(traj_.derivs.end(), f, f + dim_);
        else
            traj_.derivs.insert(traj_.derivs.end(), static_cast<std::size_t>(dim_), 0.0);
    }

    void push_knot_with_dense(double t_new, double h) {
        const auto& k1 = work_[0];
        const auto& k3 = work_[2];
        const auto& k4 = work_[3];
        const auto& k5 = work_[4];
        const auto& k6 = work_[5];
        const std::size_t base = traj_.dense_.size();
        traj_.dense_.resize(base + 5 * static_cast<std::size_t>(dim_));
        double* rc = traj_.dense_.data() + base;
        for (int i = 0; i < dim_; ++i) {
            const double ydiff = ynew_[i] - y_[i];
            const double bspl = h * k1[i] - ydiff;
            rc[i] = y_[i];
            rc[dim_ + i] = ydiff;
            rc[2 * dim_ + i] = bspl;
            rc[3 * dim_ + i] = ydiff - h * k7_[i] - bspl;
            rc[4 * dim_ + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                    d6 * k6[i] + d7 * k7_[i]);
        }
        traj_.block_h_.push_back(h);
        push_knot(t_new, ynew_.data(), k7_.data());
    }

    // Scans the last accepted interval for event crossings of every spec,
    // sorts them by parameter, and records them in order. Returns true when a
    // terminal event ended the trajectory; later crossings are discarded.
    bool process_events() {
        if (events_.empty()) return false;
        const std::size_t interval = traj_.block_h_.size() - 1;
        const double ta = traj_.params[interval];
        const double tb = traj_.params[interval + 1];
        constexpr int kScan = 4;
        std::vector<double> ys(dim_);

        struct Candidate {
            double param;
            std::size_t spec;
        };
        std::vector<Candidate> found;

        for (std::size_t ev = 0; ev < events_.size(); ++ev) {
            const auto& spec = events_[ev];
            double tprev = ta;
            double gprev = eval_event(spec, interval, ta, ys);
            for (int s = 1; s <= kScan; ++s) {
                const double ts = ta + (tb - ta) * s / kScan;
                const double gs = eval_event(spec, interval, ts, ys);
                const bool crossed = (gprev * gs < 0.0) || (gs == 0.0 && gprev != 0.0);
                if (crossed && direction_ok(spec, gprev)) {
                    const double te =
                        (gs == 0.0) ? ts : refine(spec, interval, tprev, ts, gprev, ys);
                    if (te - last_event_param_[ev] > kEventDedupe) {
                        traj_.interp(interval, te, ys.data());
                        if (!spec.gate || spec.gate(te, ys.data())) found.push_back({te, ev});
                    }
                }
                tprev = ts;
                gprev = gs;
            }
        }
        if (found.empty()) return false;
        std::sort(found.begin(), found.end(),
                  [](const Candidate& a, const Candidate& b) { return a.param < b.param; });

        for (const auto& cand : found) {
            const auto& spec = events_[cand.spec];
            traj_.interp(interval, cand.param, ys.data());
            last_event_param_[cand.spec] = cand.param;
            Event e;
            e.kind = spec.classify ? spec.classify(cand.param, ys.data()) : spec.kind;
            e.param = cand.param;
            e.state = ys;
            traj_.events.push_back(std::move(e));
            if (spec.terminal) {
                truncate_at(cand.param);
                traj_.termination = spec.kind == EventKind::Singularity ? Termination::Singularity
                                                                        : Termination::Escape;
                return true;
            }
        }
        return false;
    }

    double eval_event(const EventSpec& spec, std::size_t interval, double t,
                      std::vector<double>& ys) {
        traj_.interp(interval, t, ys.data());
        return spec.value(t, ys.data());
    }

    // A detected bracket always has ga != 0, so the crossing direction is the
    // sign of the left endpoint.
    static bool direction_ok(const EventSpec& spec, double ga) {
        if (spec.direction > 0) return ga < 0.0;
        if (spec.direction < 0) return ga > 0.0;
        return true;
    }

    double refine(const EventSpec& spec, std::size_t interval, double a, double b, double ga,
                  std::vector<double>& ys) {
        for (int it = 0; it < 80 && (b - a) > kEventParamTol; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const double gm = eval_event(spec, interval, m, ys);
            if (gm == 0.0) return m;
            if (ga * gm < 0.0) {
                b = m;
            } else {
                a = m;
                ga = gm;
            }
        }
        return 0.5 * (a + b);
    }

    void truncate_at(double te) {
        // Replace the last knot with the event state; the dense block of the
        // final interval keeps its original step length so interpolation
        // remains valid on [t_a, te].
        std::vector<double> ys(dim_);
        const std::size_t interval = traj_.block_h_.size() - 1;
        traj_.interp(interval, te, ys.data());
        traj_.params.back() = te;
        std::vector<double> f(dim_, 0.0);
        try {
            rhs_(te, ys.data(), f.data());
        } catch (const SingularityError&) {
            std::fill(f.begin(), f.end(), 0.0);
        }
        std::copy(ys.begin(), ys.end(), traj_.states.end() - dim_);
        std::copy(f.begin(), f.end(), traj_.derivs.end() - dim_);
    }

    const RhsFn& rhs_;
    const IntegratorConfig& cfg_;
    const std::vector<EventSpec>& events_;
    int dim_;
    Trajectory traj_;
    std::vector<double> y_, ynew_, k7_;
    std::vector<double> work_[7];
    std::vector<int> unit_scale_;
    std::vector<double> last_event_param_;
    double facold_ = 1e-4;
    bool last_reject_singular_ = false;
};

Trajectory integrate(const RhsFn& rhs, int dim, const double* y0, const IntegratorConfig& config,
                     const std::vector<EventSpec>& events) {
    if (!(config.horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be > 0");
    if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be > 0");
    Dopri5Stepper stepper(rhs, dim, y0, config, events);
    return stepper.run();
}

std::vector<ApsisEvent> detect_apsides(const Trajectory& traj, int r_index, int r_dot_index,
                                       const std::function<double(double, const double*)>& r_ddot,
                                       double noise_floor) {
    std::vector<ApsisEvent> out;
    if (traj.knots() < 2) return out;
    std::vector<double> ys(traj.dim);
    double ref_r = traj.knot_state(0)[r_index];

    for (std::size_t i = 0; i + 1 < traj.knots(); ++i) {
        const double ta = traj.params[i];
        const double tb = traj.params[i + 1];
        constexpr int kScan = 2;
        double tprev = ta;
        traj.interp(i, ta, ys.data());
        double gprev = ys[r_dot_index];
        for (int s = 1; s <= kScan; ++s) {
            const double ts = ta + (tb - ta) * s / kScan;
            traj.interp(i, ts, ys.data());
            const double gs = ys[r_dot_index];
            if ((gprev * gs < 0.0) || (gs == 0.0 && gprev != 0.0)) {
                double a = tprev, b = ts, ga = gprev;
                for (int it = 0; it < 80 && (b - a) > kEventParamTol; ++it) {
                    const double m = 0.5 * (a + b);
                    if (m <= a || m >= b) break;
                    traj.interp(i, m, ys.data());
                    const double gm = ys[r_dot_index];
                    if (gm == 0.0) { a = b = m; break; }
                    if (ga * gm < 0.0) b = m; else { a = m; ga = gm; }
                }
                const double te = 0.5 * (a + b);
                traj.interp(i, te, ys.data());
                const double r_here = ys[r_index];
                if (std::abs(r_here - ref_r) >= noise_floor) {
                    ApsisEvent ap;
                    ap.param = te;
                    ap.r = r_here;
                    ap.is_min = r_ddot(te, ys.data()) > 0.0;
                    out.push_back(ap);
                    ref_r = r_here;
                }
            }
            tprev = ts;
            gprev = gs;
        }
    }
    return out;
}

std::vector<double> reference_rk4(const RhsFn& rhs, int dim, const double* y0, double t0, double t1,
                                  double h) {
    std::vector<double> y(y0, y0 + dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    double t = t0;
    while (t < t1 - 1e-15 * std::max(1.0, std::abs(t1))) {
        const double hs = std::min(h, t1 - t);
        rhs(t, y.data(), k1.data());
        for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * hs * k1[i];
        rhs(t + 0.5 * hs, tmp.data(), k2.data());
        for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * hs * k2[i];
        rhs(t + 0.5 * hs, tmp.data(), k3.data());
        for (int i = 0; i < dim; ++i) tmp[i] = y[i] + hs * k3[i];
        rhs(t + hs, tmp.data(), k4.data());
        for (int i = 0; i < dim; ++i)
            y[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += hs;
    }
    return y;
}

}  // namespace grintrap
