#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nlcm/dynamics.hpp"

namespace nlcm {

enum class StepMode { Fixed, Adaptive };

struct IntegratorConfig {
    StepMode mode = StepMode::Adaptive;
    double h = 1e-3;      // fixed-mode step size
    double rtol = 1e-10;  // adaptive relative tolerance
    double atol = 1e-10;  // adaptive absolute tolerance
    double h_min = 1e-12;
    double h_max = 0.0;  // 0 = no cap
    double blowup_threshold = 1e8;  // terminal bound on |v|
    long max_steps = 2000000;
    double sample_dt = 0.0;  // 0 = record every accepted step
};

enum class RunStatus { Completed, BlewUp, StepUnderflow, MaxSteps };

enum class Direction { Forward, Backward };

std::string to_string(RunStatus s);

/// One recorded point: the state, the value of each attached constant at
/// that point, and the accumulated extra quadratures.
struct Sample {
    State state;
    Vec constants;
    Vec extras;
};

struct Trajectory {
    std::vector<Sample> samples;
    RunStatus status = RunStatus::Completed;
    Direction direction = Direction::Forward;
    /// Completed: final time.  BlewUp: first time the bound was exceeded or
    /// a trial step went non-finite (the last accepted sample is retained;
    /// nothing is extrapolated).  StepUnderflow/MaxSteps: time of the stop.
    double t_stop = 0.0;
    std::string stop_reason;
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    std::size_t n_rhs = 0;

    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }
};

/// Integrate the augmented system from s0 to t_end (t_end < s0.t integrates
/// backward by negating the vector field; one code path, direction
/// recorded).  Accumulators start at zero; each sample carries the value of
/// every attached constant.
Trajectory integrate(const SecondOrderSystem& system,
                     std::span<const NonlocalConstant> constants, const State& s0, double t_end,
                     const IntegratorConfig& cfg = {},
                     std::span<const QuadratureFn> extras = {});

/// First-order vector field in flat coordinates.
using OdeFn = std::function<void(double, std::span<const double>, std::span<double>)>;

struct RawResult {
    RunStatus status = RunStatus::Completed;
    double t_stop = 0.0;
    std::string stop_reason;
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    std::size_t n_rhs = 0;
};

/// Low-level driver shared by everything in this module: adaptive embedded
/// 5(4) pair (or fixed classical RK4) over an arbitrary first-order field.
///
/// Sampling: every sample_dt > 0 (cubic Hermite on accepted steps), else at
/// every accepted step.  on_sample always fires at t0 first.  `blow_metric`
/// maps the flat state to the scalar compared against blowup_threshold
/// (pass {} to disable).
RawResult integrate_raw(const OdeFn& f, double t0, std::span<const double> y0, double t_end,
                        const IntegratorConfig& cfg,
                        const std::function<void(double, std::span<const double>)>& on_sample,
                        const std::function<double(std::span<const double>)>& blow_metric);

/// Solve a flat first-order system and return its values at the requested
/// times (strictly monotone, starting from t0).  Each requested time is hit
/// as an exact step endpoint, so the values carry full stepper accuracy
/// even where the solution is steep.  Throws NonFiniteError if the solution
/// stops (blow-up, underflow) before the last requested time.
std::vector<Vec> solve_at_times(const OdeFn& f, double t0, const Vec& y0,
                                std::span<const double> times, const IntegratorConfig& cfg,
                                RawResult* raw = nullptr);

struct OrderReport {
    std::vector<double> h_values;
    std::vector<double> errors;   // against the exact solution at t_end
    std::vector<double> orders;   // log2(errors[i]/errors[i+1])
    double mean_order = 0.0;
    bool exact = false;  // errors at rounding level; order not meaningful
};

/// Fixed-step RK4 convergence measurement against a known solution.
OrderReport order_check(const SecondOrderSystem& system, const State& s0, double t_end,
                        const std::function<State(double)>& exact,
                        std::span<const double> h_values);

}  // namespace nlcm
