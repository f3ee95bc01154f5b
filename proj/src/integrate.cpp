#include "nlcm/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlcm/errors.hpp"

namespace nlcm {

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::BlewUp: return "blew_up";
        case RunStatus::StepUnderflow: return "step_underflow";
        case RunStatus::MaxSteps: return "max_steps";
    }
    return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// y5 - y4 error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Step-size controller constants, as in the classic dopri5 driver.
constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
constexpr double facc1 = 5.0;  // max shrink factor per step
constexpr double facc2 = 0.1;  // max growth is 1/facc2 = 10

struct Workspace {
    Vec k1, k2, k3, k4, k5, k6, k7, ytmp, yerr;
    explicit Workspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), yerr(n) {}
};

double error_norm(const Vec& yerr, const Vec& y0, const Vec& y1, double atol, double rtol) {
    double s = 0.0;
    for (std::size_t i = 0; i < yerr.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = yerr[i] / sc;
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(yerr.size()));
}

// Cubic Hermite interpolation on one accepted step.
void hermite(double theta, double h, const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1,
             Vec& out) {
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    out.resize(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
}

double initial_step(const OdeFn& g, double tau_span, const Vec& y0, const Vec& f0, double atol,
                    double rtol) {
    const std::size_t n = y0.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, tau_span);
    Vec y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
    double d2 = 0.0;
    try {
        g(h0, y1, f1);
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = atol + rtol * std::abs(y0[i]);
            const double r = (f1[i] - f0[i]) / sc;
            d2 += r * r;
        }
        d2 = std::sqrt(d2 / n) / h0;
    } catch (const Error&) {
        d2 = 1.0 / h0;  // derivative probe failed; be conservative
    }
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, tau_span});
}

}  // namespace

RawResult integrate_raw(const OdeFn& f, double t0, std::span<const double> y0_in, double t_end,
                        const IntegratorConfig& cfg,
                        const std::function<void(double, std::span<const double>)>& on_sample,
                        const std::function<double(std::span<const double>)>& blow_metric) {
    if (t_end == t0) throw ContractViolation("integration span is empty: t_end equals t0");
    if (!(cfg.h > 0) || !(cfg.rtol > 0) || !(cfg.atol > 0) || !(cfg.h_min > 0) ||
        !(cfg.blowup_threshold > 0))
        throw ContractViolation("integrator configuration requires positive h, rtol, atol, "
                                "h_min and blowup_threshold");

    const double dir = (t_end > t0) ? 1.0 : -1.0;
    const double span = std::abs(t_end - t0);
    // Backward runs integrate the negated field in internal time tau >= 0.
    auto g = [&](double tau, std::span<const double> y, std::span<double> dy) {
        f(t0 + dir * tau, y, dy);
        if (dir < 0)
            for (double& d : dy) d = -d;
    };

    const std::size_t n = y0_in.size();
    Vec y(y0_in.begin(), y0_in.end());
    Workspace w(n);
    RawResult res;

    // Uniform-grid sampling state.
    double next_uniform = cfg.sample_dt;
    auto emit = [&](double tau, std::span<const double> yy) { on_sample(t0 + dir * tau, yy); };
    emit(0.0, y);
    if (blow_metric && blow_metric(y) >= cfg.blowup_threshold) {
        res.status = RunStatus::BlewUp;
        res.t_stop = t0;
        res.stop_reason = "blow-up bound already exceeded at the initial state";
        return res;
    }

    // Sample everything owed in (tau_prev, tau_now] using the Hermite cubic
    // of the accepted step.
    Vec interp(n);
    auto drain_samples = [&](double tau_prev, double tau_now, double h, const Vec& yprev,
                             const Vec& fprev, const Vec& ynow, const Vec& fnow) {
        const double eps = 1e-12 * (1.0 + std::abs(tau_now));
        if (cfg.sample_dt > 0) {
            while (next_uniform <= tau_now + eps) {
                if (next_uniform >= tau_now - eps) {
                    emit(tau_now, ynow);
                } else {
                    hermite((next_uniform - tau_prev) / h, h, yprev, fprev, ynow, fnow, interp);
                    emit(next_uniform, interp);
                }
                next_uniform += cfg.sample_dt;
            }
        } else {
            emit(tau_now, ynow);
        }
    };

    auto rhs = [&](double tau, const Vec& yy, Vec& out) {
        g(tau, yy, out);
        ++res.n_rhs;
        if (!all_finite(out)) throw NonFiniteError("non-finite right-hand side", t0 + dir * tau);
    };

    double tau = 0.0;
    try {
        rhs(0.0, y, w.k1);
    } catch (const Error& e) {
        res.status = RunStatus::BlewUp;
        res.t_stop = t0;
        res.stop_reason = std::string("right-hand side failed at the initial state: ") + e.what();
        return res;
    }

    const bool adaptive = cfg.mode == StepMode::Adaptive;
    double h = adaptive ? initial_step([&](double tt, std::span<const double> yy,
                                           std::span<double> dy) { g(tt, yy, dy); },
                                       span, y, w.k1, cfg.atol, cfg.rtol)
                        : cfg.h;
    if (cfg.h_max > 0) h = std::min(h, cfg.h_max);
    double facold = 1e-4;
    bool last = false;
    long steps = 0;

    Vec ynew(n);
    while (true) {
        if (steps++ >= cfg.max_steps) {
            res.status = RunStatus::MaxSteps;
            res.t_stop = t0 + dir * tau;
            res.stop_reason = "step limit reached";
            return res;
        }
        if (tau + h >= span - 1e-14 * span) {
            h = span - tau;
            last = true;
        }

        // Both steppers leave the proposed state in ynew and f(t+h, ynew) in
        // w.k7, so the Hermite interpolant and FSAL reuse are uniform.
        auto dopri5_stages = [&] {
            const Vec& k1 = w.k1;
            for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * a21 * k1[i];
            rhs(tau + c2 * h, w.ytmp, w.k2);
            for (std::size_t i = 0; i < n; ++i)
                w.ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * w.k2[i]);
            rhs(tau + c3 * h, w.ytmp, w.k3);
            for (std::size_t i = 0; i < n; ++i)
                w.ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
            rhs(tau + c4 * h, w.ytmp, w.k4);
            for (std::size_t i = 0; i < n; ++i)
                w.ytmp[i] =
                    y[i] + h * (a51 * k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
            rhs(tau + c5 * h, w.ytmp, w.k5);
            for (std::size_t i = 0; i < n; ++i)
                w.ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * w.k2[i] + a63 * w.k3[i] +
                                        a64 * w.k4[i] + a65 * w.k5[i]);
            rhs(tau + h, w.ytmp, w.k6);
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i] + h * (a71 * k1[i] + a73 * w.k3[i] + a74 * w.k4[i] +
                                      a75 * w.k5[i] + a76 * w.k6[i]);
            rhs(tau + h, ynew, w.k7);
            for (std::size_t i = 0; i < n; ++i)
                w.yerr[i] = h * (e1 * k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] +
                                 e6 * w.k6[i] + e7 * w.k7[i]);
            return error_norm(w.yerr, y, ynew, cfg.atol, cfg.rtol);
        };
        auto rk4_stages = [&] {
            const Vec& k1 = w.k1;
            for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * h * k1[i];
            rhs(tau + 0.5 * h, w.ytmp, w.k2);
            for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * h * w.k2[i];
            rhs(tau + 0.5 * h, w.ytmp, w.k3);
            for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * w.k3[i];
            rhs(tau + h, w.ytmp, w.k4);
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
            rhs(tau + h, ynew, w.k7);
            return 0.0;
        };

        bool stage_failed = false;
        std::string stage_reason;
        double err = 0.0;
        try {
            err = adaptive ? dopri5_stages() : rk4_stages();
        } catch (const Error& e) {
            stage_failed = true;
            stage_reason = e.what();
        }

        if (!adaptive) {
            if (stage_failed) {
                res.status = RunStatus::BlewUp;
                res.t_stop = t0 + dir * (tau + h);
                res.stop_reason = stage_reason;
                return res;
            }
        } else if (stage_failed || err > 1.0) {
            // Reject: shrink and retry.  A failed stage is treated as a very
            // large error estimate.
            ++res.n_rejected;
            last = false;
            const double fac =
                stage_failed ? facc1 : std::min(facc1, std::pow(err, expo1) / safe);
            h /= fac;
            if (h < cfg.h_min) {
                if (stage_failed) {
                    // Overflow folds into blow-up; the recorded time is the
                    // rejected attempt, the last accepted sample stands.
                    res.status = RunStatus::BlewUp;
                    res.t_stop = t0 + dir * (tau + h * fac);
                    res.stop_reason = "step size underflow forced by failing right-hand side: " +
                                      stage_reason;
                } else {
                    res.status = RunStatus::StepUnderflow;
                    res.t_stop = t0 + dir * tau;
                    res.stop_reason = "step size control demanded h below h_min";
                }
                return res;
            }
            continue;
        }

        // Accepted.
        ++res.n_accepted;
        const double tau_prev = tau;
        tau += h;
        drain_samples(tau_prev, tau, h, y, w.k1, ynew, w.k7);
        y = ynew;
        w.k1 = w.k7;  // FSAL

        if (blow_metric && blow_metric(y) >= cfg.blowup_threshold) {
            res.status = RunStatus::BlewUp;
            res.t_stop = t0 + dir * tau;
            res.stop_reason = "blow-up bound reached";
            return res;
        }
        if (last) {
            res.status = RunStatus::Completed;
            res.t_stop = t0 + dir * tau;
            return res;
        }

        if (adaptive) {
            const double fac11 = std::pow(std::max(err, 1e-16), expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            facold = std::max(err, 1e-4);
            h = h / fac;
            if (cfg.h_max > 0) h = std::min(h, cfg.h_max);
            if (h < cfg.h_min) {
                res.status = RunStatus::StepUnderflow;
                res.t_stop = t0 + dir * tau;
                res.stop_reason = "step size control demanded h below h_min";
                return res;
            }
        }
    }
}

Trajectory integrate(const SecondOrderSystem& system,
                     std::span<const NonlocalConstant> constants, const State& s0, double t_end,
                     const IntegratorConfig& cfg, std::span<const QuadratureFn> extras) {
    if (s0.dim() != system.dim)
        throw ContractViolation("initial state dimension does not match system '" + system.id +
                                "'");
    if (s0.acc_integrals.size() != constants.size())
        throw ContractViolation("initial state carries " +
                                std::to_string(s0.acc_integrals.size()) +
                                " accumulators but " + std::to_string(constants.size()) +
                                " constants are attached");
    for (const auto& c : constants)
        if (c.system.dim != system.dim)
            throw ContractViolation("constant '" + c.label + "' was built for dimension " +
                                    std::to_string(c.system.dim));

    const std::size_t n = system.dim;
    const std::size_t nc = constants.size();
    Trajectory traj;
    traj.direction = (t_end > s0.t) ? Direction::Forward : Direction::Backward;

    OdeFn f = [&](double t, std::span<const double> y, std::span<double> dy) {
        augmented_rhs(system, constants, extras, t, y, dy);
    };
    auto on_sample = [&](double t, std::span<const double> y) {
        Sample s;
        s.state = unpack_state(t, y, n, nc);
        s.constants.resize(nc);
        for (std::size_t c = 0; c < nc; ++c)
            s.constants[c] = constants[c].value(s.state, s.state.acc_integrals[c]);
        s.extras.assign(y.begin() + 2 * n + nc, y.end());
        traj.samples.push_back(std::move(s));
    };
    auto blow_metric = [n](std::span<const double> y) {
        return norm(y.subspan(n, n));
    };

    const Vec y0 = pack_state(s0, extras.size());
    RawResult raw = integrate_raw(f, s0.t, y0, t_end, cfg, on_sample, blow_metric);
    traj.status = raw.status;
    traj.t_stop = raw.t_stop;
    traj.stop_reason = raw.stop_reason;
    traj.n_accepted = raw.n_accepted;
    traj.n_rejected = raw.n_rejected;
    traj.n_rhs = raw.n_rhs;
    return traj;
}

std::vector<Vec> solve_at_times(const OdeFn& f, double t0, const Vec& y0,
                                std::span<const double> times, const IntegratorConfig& cfg,
                                RawResult* raw) {
    // Integrated segment by segment so each requested time is an exact step
    // endpoint; the cubic interpolant is too coarse for steep solutions.
    std::vector<Vec> out;
    out.reserve(times.size());
    Vec y = y0;
    double t = t0;
    RawResult total;
    for (double target : times) {
        if (std::abs(target - t) < 1e-14 * (1.0 + std::abs(t))) {
            out.push_back(y);
            continue;
        }
        auto on_sample = [&](double, std::span<const double> yy) {
            y.assign(yy.begin(), yy.end());
        };
        RawResult r = integrate_raw(f, t, y, target, cfg, on_sample, {});
        total.n_accepted += r.n_accepted;
        total.n_rejected += r.n_rejected;
        total.n_rhs += r.n_rhs;
        total.status = r.status;
        total.t_stop = r.t_stop;
        total.stop_reason = r.stop_reason;
        if (r.status != RunStatus::Completed) {
            if (raw) *raw = total;
            throw NonFiniteError("trajectory stopped (" + to_string(r.status) +
                                     ") before reaching the requested time " +
                                     std::to_string(target),
                                 r.t_stop);
        }
        t = target;
        out.push_back(y);
    }
    if (raw) *raw = total;
    return out;
}

OrderReport order_check(const SecondOrderSystem& system, const State& s0, double t_end,
                        const std::function<State(double)>& exact,
                        std::span<const double> h_values) {
    OrderReport rep;
    rep.h_values.assign(h_values.begin(), h_values.end());
    const State ref = exact(t_end);
    for (double h : h_values) {
        IntegratorConfig cfg;
        cfg.mode = StepMode::Fixed;
        cfg.h = h;
        Trajectory traj = integrate(system, {}, s0, t_end, cfg);
        const State& last = traj.back().state;
        double err = 0.0;
        for (std::size_t i = 0; i < system.dim; ++i) {
            err = std::max(err, std::abs(last.q[i] - ref.q[i]));
            err = std::max(err, std::abs(last.v[i] - ref.v[i]));
        }
        rep.errors.push_back(err);
    }
    const double rounding_floor = 1e-12;
    rep.exact = true;
    for (double e : rep.errors)
        if (e > rounding_floor) rep.exact = false;
    if (!rep.exact) {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i) {
            rep.orders.push_back(std::log2(rep.errors[i] / rep.errors[i + 1]));
            sum += rep.orders.back();
        }
        if (!rep.orders.empty()) rep.mean_order = sum / static_cast<double>(rep.orders.size());
    }
    return rep;
}

}  // namespace nlcm
