#include <cmath>
#include <random>

#include "doctest.h"
#include "nlcm/analysis.hpp"
#include "nlcm/errors.hpp"
#include "nlcm/families.hpp"
#include "nlcm/integrate.hpp"
#include "nlcm/models.hpp"

using namespace nlcm;

namespace {

std::mt19937_64 rng(31337);

Vec random_vec(std::size_t n, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec x(n);
    for (auto& xi : x) xi = u(rng);
    return x;
}

}  // namespace

TEST_CASE("rotation family variation vectors") {
    auto fam = rotation_family(0, 1);
    const Vec zero2{0.0, 0.0};
    CHECK(fam.delta_q(0.0, {1.0, 0.0}, zero2, zero2) == Vec{0.0, 1.0});
    CHECK(fam.delta_q(0.0, zero2, zero2, zero2) == Vec{0.0, 0.0});
    CHECK_THROWS_AS(rotation_family(1, 1), ContractViolation);
    CHECK_THROWS_AS(fam.delta_q(0.0, {1.0}, {0.0}, {0.0}), ContractViolation);
}

TEST_CASE("clockwise Maxwell-Bloch rotation keeps its own sign convention") {
    auto fam = mb_rotation_family();
    const Vec zero3{0.0, 0.0, 0.0};
    CHECK(fam.delta_q(0.0, {1.0, 2.0, 5.0}, zero3, zero3) == Vec{2.0, -1.0, 0.0});
}

TEST_CASE("time-shift family is (v, a)") {
    auto fam = time_shift_family();
    const Vec q{0.0, 0.0}, v{1.0, 2.0}, a{0.0, 0.0};
    CHECK(fam.delta_q(0.0, q, v, a) == v);
    CHECK(fam.delta_v(0.0, q, v, a) == a);
}

TEST_CASE("scaling family variation vectors") {
    auto fam = scaling_hom2_family();
    const Vec zero2{0.0, 0.0};
    CHECK(fam.delta_q(0.0, {1.0, 0.0}, {0.0, 1.0}, zero2) == Vec{1.0, 0.0});
    CHECK(fam.delta_q(1.0, {1.0, 0.0}, {0.0, 1.0}, zero2) == Vec{1.0, -2.0});
}

TEST_CASE("drag shift families at the base time") {
    const Vec q{0.0}, v{1.5}, a{-2.0};
    CHECK(visc_shift_family(1.0, 1.0).delta_q(0.0, q, v, a) == v);
    CHECK(hyd_shift_family(0.7).delta_q(0.0, q, v, a) == v);
    CHECK_THROWS_AS(hyd_shift_family(0.0), ContractViolation);
}

TEST_CASE("zero-rate viscous shift degenerates to the time shift") {
    auto vs = visc_shift_family(0.0, 1.0);
    auto ts = time_shift_family();
    for (int i = 0; i < 10; ++i) {
        const double t = random_vec(1)[0];
        const Vec q = random_vec(2), v = random_vec(2), a = random_vec(2);
        CHECK(vs.delta_q(t, q, v, a) == ts.delta_q(t, q, v, a));
        CHECK(vs.delta_v(t, q, v, a) == ts.delta_v(t, q, v, a));
    }
}

TEST_CASE("small-rate hydraulic shift approaches the time shift") {
    auto hs = hyd_shift_family(1e-9);
    auto ts = time_shift_family();
    const double t = 1.3;
    const Vec q{0.4}, v{1.1}, a{-0.9};
    CHECK(hs.delta_q(t, q, v, a)[0] == doctest::Approx(ts.delta_q(t, q, v, a)[0]).epsilon(1e-8));
    CHECK(hs.delta_v(t, q, v, a)[0] == doctest::Approx(ts.delta_v(t, q, v, a)[0]).epsilon(1e-8));
}

TEST_CASE("Maxwell-Bloch scaling and translation families") {
    const Vec zero3{0.0, 0.0, 0.0};
    auto sc = mb_aniso_scaling_family();
    CHECK(sc.delta_q(0.0, {1.0, 1.0, 1.0}, zero3, zero3) == Vec{1.0, 1.0, -2.0});
    CHECK(sc.delta_q(0.0, zero3, zero3, zero3) == Vec{0.0, 0.0, 0.0});
    auto tr = mb_translation_family(2.0);
    CHECK(tr.delta_q(0.0, zero3, zero3, zero3) == Vec{0.0, 0.0, 2.0});
    CHECK(tr.delta_v(0.0, zero3, zero3, zero3) == Vec{0.0, 0.0, 4.0});
}

TEST_CASE("family consistency: delta_v is the time derivative of delta_q") {
    // Every family, checked against finite differences along the flow of a
    // model it applies to, at 100 random states each.
    struct Case {
        SecondOrderSystem sys;
        PerturbationFamily fam;
    };
    std::vector<Case> cases;
    {
        auto central = make_central_inverse_square({.m = 1.0, .k_pot = 0.5, .n = 2});
        cases.push_back({central, rotation_family(0, 1)});
        cases.push_back({central, time_shift_family()});
        cases.push_back({central, scaling_hom2_family()});
    }
    {
        auto viscous = make_viscous({.m = 1.3, .k_drag = 0.8});
        cases.push_back({viscous, visc_shift_family(0.8, 1.3)});
    }
    {
        HydraulicParams p;
        p.m = 1.0;
        p.k_drag = 1.0;
        auto hyd = make_hydraulic(p);
        cases.push_back({hyd, hyd_shift_family(0.5)});
    }
    {
        auto mb = make_maxwell_bloch({.a = 1.0, .b = 1.0, .c = 2.0, .g = 1.0, .k_pump = 2.0});
        cases.push_back({mb, mb_aniso_scaling_family()});
        cases.push_back({mb, mb_translation_family(2.0)});
        cases.push_back({mb, mb_rotation_family()});
    }
    for (const Case& c : cases) {
        CAPTURE(c.fam.name);
        for (int i = 0; i < 100; ++i) {
            Vec q = random_vec(c.sys.dim);
            if (c.sys.id == "central2" && norm(q) < 0.3) q[0] += 1.0;
            const State s = make_state(random_vec(1)[0], q, random_vec(c.sys.dim));
            CHECK(family_consistency_residual(c.sys, c.fam, s) < 1e-4);
        }
    }
}

TEST_CASE("free linear drag makes the shifted constant exactly exp(2kt/m) m |v|^2") {
    ViscousParams p;
    p.m = 1.0;
    p.k_drag = 1.0;
    p.U = zero_potential();
    auto sys = make_viscous(p);
    std::vector<NonlocalConstant> constants{{sys, visc_shift_family(1.0, 1.0), "vshift"}};
    const State s0 = make_state(0.0, {0.0, 0.0}, {0.6, -0.8}, 1);
    Trajectory traj = integrate(sys, constants, s0, 3.0);
    // v(t) = v0 exp(-kt/m), so the boundary term m e^{2kt/m} |v|^2 is
    // literally constant and the integral term vanishes.
    for (const Sample& s : traj.samples) {
        CHECK(std::abs(s.state.acc_integrals[0]) < 1e-9);
        CHECK(s.constants[0] == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("central rotation constant stays at the initial angular momentum") {
    auto sys = make_central_inverse_square({.m = 1.0, .k_pot = 0.5, .n = 2});
    std::vector<NonlocalConstant> constants{{sys, rotation_family(0, 1), "rot"}};
    const State s0 = make_state(0.0, {1.0, 0.0}, {0.1, 1.0}, 1);
    Trajectory traj = integrate(sys, constants, s0, 5.0);
    const double l0 = 1.0;  // q1 v2 - q2 v1 at t0
    for (const Sample& s : traj.samples) {
        CHECK(std::abs(s.constants[0] - l0) < 1e-8);
        CHECK(std::abs(s.state.acc_integrals[0]) < 1e-10);
    }
}

TEST_CASE("time-shift constant is the energy up to the initial Lagrangian") {
    auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
    std::vector<NonlocalConstant> constants{{sys, time_shift_family(), "tshift"}};
    const State s0 = make_state(0.0, {1.0, 0.0}, {0.0, 0.5}, 1);
    Trajectory traj = integrate(sys, constants, s0, 6.0);
    const double L0 = sys.lagrangian(0.0, s0.q, s0.v);
    for (const Sample& s : traj.samples) {
        const double energy = 0.5 * norm2(s.state.v) + sys.potential(s.state.q);
        CHECK(s.constants[0] == doctest::Approx(energy + L0).epsilon(1e-9));
    }
}

TEST_CASE("family registry resolves ids and rejects malformed ones") {
    auto mb = make_maxwell_bloch({.a = 1.0, .b = 1.0, .c = 2.0, .g = 1.0, .k_pump = 2.0});
    CHECK(make_family("rot:0,1", mb).name == "rot:0,1");
    CHECK(make_family("tshift", mb).name == "tshift");
    CHECK(make_family("scale2", mb).name == "scale2");
    CHECK(make_family("hshift:0.25", mb).name.rfind("hshift:", 0) == 0);
    CHECK(make_family("mb-scale", mb).name == "mb-scale");
    CHECK(make_family("mb-trans", mb).name == "mb-trans");
    CHECK(make_family("mb-rot", mb).name == "mb-rot");
    CHECK_THROWS_AS(make_family("rot:1", mb), ContractViolation);
    CHECK_THROWS_AS(make_family("hshift:-1", mb), ContractViolation);
    CHECK_THROWS_AS(make_family("warp", mb), ContractViolation);
    CHECK(family_id_templates().size() == 8);
}
