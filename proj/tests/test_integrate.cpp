#include <cmath>
#include <future>

#include "doctest.h"
#include "nlcm/analysis.hpp"
#include "nlcm/errors.hpp"
#include "nlcm/families.hpp"
#include "nlcm/integrate.hpp"
#include "nlcm/models.hpp"

using namespace nlcm;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("free particle integrates exactly") {
    auto sys = make_free_particle();
    Trajectory traj = integrate(sys, {}, make_state(0.0, {0.0}, {1.0}), 2.0);
    REQUIRE(traj.status == RunStatus::Completed);
    CHECK(traj.back().state.q[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("harmonic oscillator returns home after one period") {
    auto sys = make_harmonic_oscillator();
    Trajectory traj = integrate(sys, {}, make_state(0.0, {1.0}, {0.0}), 2.0 * kPi);
    REQUIRE(traj.status == RunStatus::Completed);
    CHECK(std::abs(traj.back().state.q[0] - 1.0) < 1e-6);
    CHECK(std::abs(traj.back().state.v[0]) < 1e-6);
}

TEST_CASE("backward quadratic drag blows up near t = -1") {
    HydraulicParams p;
    p.U = zero_potential();
    p.n = 1;
    auto sys = make_hydraulic(p);
    Trajectory traj = integrate(sys, {}, make_state(0.0, {0.0}, {1.0}), -2.0);
    REQUIRE(traj.status == RunStatus::BlewUp);
    CHECK(traj.direction == Direction::Backward);
    // Detection is conservative: |v| = m/(k (t - ts)) crosses the bound at
    // ts + m/(k * bound), so the detected time sits within m/(k sqrt(bound))
    // of the true singular time with lots of room.
    CHECK(std::abs(traj.t_stop - (-1.0)) < 1e-6);
    // The last accepted sample is retained, nothing is extrapolated.
    CHECK(norm(traj.back().state.v) >= 1e7);
}

TEST_CASE("a right-hand side that stops being finite folds into blew_up") {
    SecondOrderSystem sys = make_free_particle();
    sys.acceleration = [](double t, const Vec& q, const Vec&) {
        Vec a = zeros(q.size());
        if (t > 1.0) a[0] = std::numeric_limits<double>::quiet_NaN();
        return a;
    };
    Trajectory traj = integrate(sys, {}, make_state(0.0, {0.0}, {1.0}), 2.0);
    CHECK(traj.status == RunStatus::BlewUp);
    CHECK(traj.stop_reason.find("right-hand side") != std::string::npos);
    CHECK(traj.t_stop <= 1.0 + 1e-6);
}

TEST_CASE("velocity bound terminates with the crossing time recorded") {
    auto sys = make_free_particle();
    IntegratorConfig cfg;
    cfg.blowup_threshold = 0.5;
    Trajectory traj = integrate(sys, {}, make_state(0.0, {0.0}, {1.0}), 1.0, cfg);
    CHECK(traj.status == RunStatus::BlewUp);
}

TEST_CASE("step limit reports max_steps") {
    auto sys = make_harmonic_oscillator();
    IntegratorConfig cfg;
    cfg.max_steps = 3;
    Trajectory traj = integrate(sys, {}, make_state(0.0, {1.0}, {0.0}), 100.0, cfg);
    CHECK(traj.status == RunStatus::MaxSteps);
}

TEST_CASE("RK4 order measurements") {
    SUBCASE("harmonic oscillator: order 4") {
        auto sys = make_harmonic_oscillator();
        auto exact = [](double t) { return make_state(t, {std::cos(t)}, {-std::sin(t)}); };
        const double hs[] = {0.1, 0.05, 0.025};
        const OrderReport rep = order_check(sys, make_state(0.0, {1.0}, {0.0}), 2.0, exact, hs);
        CHECK(!rep.exact);
        CHECK(rep.mean_order > 3.7);
        CHECK(rep.mean_order < 4.3);
    }
    SUBCASE("free particle: exact") {
        auto sys = make_free_particle();
        auto exact = [](double t) { return make_state(t, {t}, {1.0}); };
        const double hs[] = {0.1, 0.05};
        const OrderReport rep = order_check(sys, make_state(0.0, {0.0}, {1.0}), 2.0, exact, hs);
        CHECK(rep.exact);
    }
    SUBCASE("circular orbit of the inverse-square model: order 4") {
        auto sys = make_central_inverse_square({});
        auto exact = [](double t) {
            return make_state(t, {std::cos(t), std::sin(t)}, {-std::sin(t), std::cos(t)});
        };
        const double hs[] = {0.1, 0.05, 0.025};
        const OrderReport rep =
            order_check(sys, make_state(0.0, {1.0, 0.0}, {0.0, 1.0}), 1.0, exact, hs);
        CHECK(rep.mean_order > 3.7);
        CHECK(rep.mean_order < 4.3);
    }
}

TEST_CASE("forward-backward round trip restores the initial state") {
    auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
    IntegratorConfig cfg;
    const State s0 = make_state(0.0, {1.0, 0.2}, {0.0, -0.3});
    Trajectory fwd = integrate(sys, {}, s0, 2.0 * kPi, cfg);
    Trajectory bwd = integrate(sys, {}, fwd.back().state, 0.0, cfg);
    const State& r = bwd.back().state;
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(r.q[i] - s0.q[i]) < 10.0 * cfg.rtol);
        CHECK(std::abs(r.v[i] - s0.v[i]) < 10.0 * cfg.rtol);
    }
}

TEST_CASE("sample times are strictly monotone in the integration direction") {
    auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
    for (double t_end : {5.0, -5.0}) {
        Trajectory traj = integrate(sys, {}, make_state(0.0, {1.0, 0.0}, {0.0, 1.0}), t_end);
        REQUIRE(traj.samples.size() > 2);
        for (std::size_t i = 1; i < traj.samples.size(); ++i) {
            const double dt = traj.samples[i].state.t - traj.samples[i - 1].state.t;
            CHECK((t_end > 0 ? dt > 0 : dt < 0));
        }
        CHECK(traj.front().state.t == 0.0);
        CHECK(traj.back().state.t == doctest::Approx(t_end).epsilon(1e-12));
    }
}

TEST_CASE("uniform sampling lands on the requested grid") {
    auto sys = make_harmonic_oscillator();
    IntegratorConfig cfg;
    cfg.sample_dt = 0.25;
    Trajectory traj = integrate(sys, {}, make_state(0.0, {1.0}, {0.0}), 2.0, cfg);
    REQUIRE(traj.samples.size() == 9);  // t0 plus 8 grid points
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].state.t == doctest::Approx(0.25 * i).epsilon(1e-12));
    // Interpolated values stay close to the cosine solution.
    for (const Sample& s : traj.samples)
        CHECK(std::abs(s.state.q[0] - std::cos(s.state.t)) < 1e-8);
}

TEST_CASE("accumulators start at zero and add over concatenated intervals") {
    auto sys = make_harmonic_oscillator();
    std::vector<NonlocalConstant> constants{{sys, time_shift_family(), "tshift"}};
    const State s0 = make_state(0.0, {1.0}, {0.0}, 1);
    Trajectory whole = integrate(sys, constants, s0, 2.0);
    CHECK(whole.front().state.acc_integrals[0] == 0.0);

    Trajectory first = integrate(sys, constants, s0, 1.0);
    State mid = first.back().state;
    const double acc1 = mid.acc_integrals[0];
    mid.acc_integrals[0] = 0.0;
    Trajectory second = integrate(sys, constants, mid, 2.0);
    const double acc2 = second.back().state.acc_integrals[0];
    CHECK(whole.back().state.acc_integrals[0] ==
          doctest::Approx(acc1 + acc2).epsilon(1e-9));
}

TEST_CASE("solve_at_times reproduces the separable closed form") {
    // z' = -2 z^{3/2}, z(0) = 1 has z(t) = (1 + t)^{-2} on t > -1.
    OdeFn f = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = -2.0 * std::pow(std::abs(y[0]), 1.5);
    };
    const double times[] = {-0.25, -0.5, -0.75};
    const auto vals = solve_at_times(f, 0.0, {1.0}, times, {});
    REQUIRE(vals.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(vals[i][0] == doctest::Approx(std::pow(1.0 + times[i], -2.0)).epsilon(1e-8));
}

TEST_CASE("independent integrations run concurrently") {
    auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
    std::vector<NonlocalConstant> constants{{sys, time_shift_family(), "tshift"}};
    const State s0 = make_state(0.0, {1.0, 0.3}, {0.0, 0.4}, 1);
    Trajectory serial = integrate(sys, constants, s0, 8.0);
    auto run = [&] { return integrate(sys, constants, s0, 8.0); };
    auto fa = std::async(std::launch::async, run);
    auto fb = std::async(std::launch::async, run);
    for (Trajectory t : {fa.get(), fb.get()}) {
        REQUIRE(t.samples.size() == serial.samples.size());
        CHECK(t.back().state.q == serial.back().state.q);
        CHECK(t.back().constants == serial.back().constants);
    }
}

TEST_CASE("empty spans and bad configs are rejected") {
    auto sys = make_free_particle();
    CHECK_THROWS_AS(integrate(sys, {}, make_state(0.0, {0.0}, {1.0}), 0.0),
                    ContractViolation);
    IntegratorConfig bad;
    bad.rtol = 0.0;
    CHECK_THROWS_AS(integrate(sys, {}, make_state(0.0, {0.0}, {1.0}), 1.0, bad),
                    ContractViolation);
}
