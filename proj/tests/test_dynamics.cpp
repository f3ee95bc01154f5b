#include <cmath>
#include <random>

#include "doctest.h"
#include "nlcm/dynamics.hpp"
#include "nlcm/errors.hpp"
#include "nlcm/families.hpp"
#include "nlcm/models.hpp"

using namespace nlcm;

TEST_CASE("boundary term of the rotation constant is the angular momentum") {
    // m (q1 v2 - q2 v1) with m = 2, q = (1,0), v = (0,3) is 6.
    auto sys = make_central_inverse_square({.m = 2.0, .k_pot = 0.5, .n = 2});
    NonlocalConstant nc{sys, rotation_family(0, 1), "rot"};
    const State s = make_state(0.0, {1.0, 0.0}, {0.0, 3.0});
    CHECK(nc.boundary_term(s) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("zero family gives a zero boundary term and zero integrand") {
    auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
    NonlocalConstant nc{sys, zero_family(), "zero"};
    const State s = make_state(0.3, {0.4, -1.0}, {2.0, 0.7});
    CHECK(nc.boundary_term(s) == 0.0);
    CHECK(nc.integrand(s) == 0.0);
    CHECK(nc.value(s, 0.0) == 0.0);
}

TEST_CASE("free particle with the time-shift family: boundary term is |v|^2") {
    auto sys = make_free_particle(1.0, 2);
    NonlocalConstant nc{sys, time_shift_family(), "tshift"};
    const State s = make_state(0.0, {0.0, 0.0}, {1.0, 2.0});
    CHECK(nc.boundary_term(s) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("rotationally invariant Lagrangian makes the rotation integrand vanish") {
    auto sys = make_central_inverse_square({.m = 2.0, .k_pot = 0.5, .n = 2});
    NonlocalConstant nc{sys, rotation_family(0, 1), "rot"};
    const State s = make_state(0.0, {1.0, 0.0}, {0.0, 3.0});
    CHECK(std::abs(nc.integrand(s)) < 1e-14);
}

TEST_CASE("quadratic-drag integrand, hand value and lambda-derivative cross-check") {
    // m = k = 1, U = 0, one dimension, family q(t + l e^{-at}) with a = 1.
    HydraulicParams p;
    p.U = zero_potential();
    p.n = 1;
    auto sys = make_hydraulic(p);
    const double a = 1.0;
    NonlocalConstant nc{sys, hyd_shift_family(a), "hshift"};

    // At t = 0, v = 1: delta_q = 1, delta_v = -a v + acc = -2, so the
    // integrand is v*delta_v + Q*delta_q = -2 - 1 = -3.
    const State s0 = make_state(0.0, {0.0}, {1.0});
    CHECK(nc.integrand(s0) == doctest::Approx(-3.0).epsilon(1e-12));

    // Cross-check along the exact solution q(t) = log(1+t), v = 1/(1+t):
    // finite-difference the Lagrangian in lambda along the explicit family
    // and add Q . delta_q.
    auto q_exact = [](double t) { return std::log(1.0 + t); };
    auto v_exact = [](double t) { return 1.0 / (1.0 + t); };
    for (double t : {0.0, 0.5, 1.5}) {
        const State s = make_state(t, {q_exact(t)}, {v_exact(t)});
        const double got = nc.integrand(s);

        const double w = std::exp(-a * t);
        const double dl = 1e-6;
        auto lagr_at = [&](double lam) {
            const double ts = t + lam * w;
            const double ql = q_exact(ts);
            const double vl = v_exact(ts) * (1.0 - lam * a * w);
            return sys.lagrangian(t, {ql}, {vl});
        };
        const double dLdl = (lagr_at(dl) - lagr_at(-dl)) / (2.0 * dl);
        const Vec acc = sys.acceleration(t, s.q, s.v);
        const double q_dot_dq = dot(sys.force_Q(t, s.q, s.v),
                                    nc.family.delta_q(t, s.q, s.v, acc));
        CHECK(got == doctest::Approx(dLdl + q_dot_dq).epsilon(1e-6));
    }
}

TEST_CASE("constant value at the base time is the boundary term") {
    auto sys = make_central_inverse_square({});
    NonlocalConstant nc{sys, scaling_hom2_family(), "scale2"};
    const State s = make_state(0.0, {1.0, 0.0}, {0.0, 1.0});
    // K = m v.q - 2 t E = 0 here.
    CHECK(nc.value(s, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(nc.value(s, 0.0) == nc.boundary_term(s));
}

TEST_CASE("augmented rhs packs velocity, acceleration and integrands") {
    SUBCASE("free particle") {
        auto sys = make_free_particle();
        const State s = make_state(0.0, {0.0}, {3.0});
        Vec y = pack_state(s), dy(y.size());
        augmented_rhs(sys, {}, {}, 0.0, y, dy);
        CHECK(dy[0] == 3.0);
        CHECK(dy[1] == 0.0);
    }
    SUBCASE("harmonic oscillator") {
        auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
        const State s = make_state(0.0, {1.0, 0.0}, {0.0, 0.0});
        Vec y = pack_state(s), dy(y.size());
        augmented_rhs(sys, {}, {}, 0.0, y, dy);
        CHECK(dy[2] == doctest::Approx(-1.0));
        CHECK(dy[3] == doctest::Approx(0.0));
    }
    SUBCASE("quadratic drag in one dimension") {
        HydraulicParams p;
        p.U = zero_potential();
        p.n = 1;
        auto sys = make_hydraulic(p);
        const State s = make_state(0.0, {0.0}, {2.0});
        Vec y = pack_state(s), dy(y.size());
        augmented_rhs(sys, {}, {}, 0.0, y, dy);
        CHECK(dy[1] == doctest::Approx(-4.0));
    }
}

TEST_CASE("dimension mismatches are contract violations") {
    auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
    NonlocalConstant nc{sys, time_shift_family(), "tshift"};
    const State s = make_state(0.0, {1.0}, {1.0});
    CHECK_THROWS_AS(nc.boundary_term(s), ContractViolation);
    CHECK_THROWS_AS(nc.integrand(s), ContractViolation);
}

TEST_CASE("non-finite integrand reports the offending time") {
    SecondOrderSystem sys = make_free_particle();
    sys.dL_dq = [](double, const Vec&, const Vec&) {
        return Vec{std::numeric_limits<double>::infinity()};
    };
    NonlocalConstant nc{sys, time_shift_family(), "bad"};
    const State s = make_state(1.5, {0.0}, {1.0});
    CHECK_THROWS_AS(nc.integrand(s), NonFiniteError);
    try {
        nc.integrand(s);
    } catch (const NonFiniteError& e) {
        CHECK(e.t == 1.5);
    }
}

TEST_CASE("Euler-Lagrange residual certifies acceleration against (L, Q)") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto states = [&](std::size_t n) {
        Vec q(n), v(n);
        for (auto& x : q) x = u(rng);
        for (auto& x : v) x = u(rng);
        return make_state(u(rng), q, v);
    };
    std::vector<SecondOrderSystem> systems;
    systems.push_back(make_harmonic_oscillator(1.3, 0.8, 3));
    systems.push_back(make_viscous({.m = 1.2, .k_drag = 0.7}));
    {
        HydraulicParams p;
        p.m = 1.1;
        p.k_drag = 0.5;
        systems.push_back(make_hydraulic(p));
    }
    for (const auto& sys : systems) {
        for (int i = 0; i < 50; ++i) {
            const State s = states(sys.dim);
            CHECK(euler_lagrange_residual(sys, s) < 1e-4);
        }
    }
}

TEST_CASE("finite-difference Lagrangian derivatives agree with analytic ones") {
    auto analytic = make_harmonic_oscillator(2.0, 1.5, 2);
    SecondOrderSystem fd = analytic;
    fill_fd_lagrangian_derivatives(fd);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 25; ++i) {
        const State s = make_state(u(rng), {u(rng), u(rng)}, {u(rng), u(rng)});
        const Vec gq_a = analytic.dL_dq(s.t, s.q, s.v), gq_f = fd.dL_dq(s.t, s.q, s.v);
        const Vec gv_a = analytic.dL_dv(s.t, s.q, s.v), gv_f = fd.dL_dv(s.t, s.q, s.v);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(gq_a[j] == doctest::Approx(gq_f[j]).epsilon(1e-6));
            CHECK(gv_a[j] == doctest::Approx(gv_f[j]).epsilon(1e-6));
        }
    }
}

TEST_CASE("pack/unpack round-trips the augmented layout") {
    State s = make_state(2.5, {1.0, -2.0}, {0.5, 0.25}, 2);
    s.acc_integrals = {3.0, -4.0};
    const Vec y = pack_state(s, 1);
    CHECK(y.size() == augmented_size(2, 2, 1));
    const State r = unpack_state(s.t, y, 2, 2);
    CHECK(r.q == s.q);
    CHECK(r.v == s.v);
    CHECK(r.acc_integrals == s.acc_integrals);
}
