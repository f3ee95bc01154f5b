#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "nlcm/state.hpp"

namespace nlcm {

using ScalarFn = std::function<double(double, const Vec&, const Vec&)>;
using VectorFn = std::function<Vec(double, const Vec&, const Vec&)>;

/// A second-order model in explicit form: a Lagrangian L(t,q,v), its partial
/// derivatives, a generalized force Q(t,q,v) on the right-hand side of the
/// Lagrange equation, and the equation solved explicitly for the
/// acceleration.  All evaluation functions are pure.
struct SecondOrderSystem {
    std::size_t dim = 0;
    std::string id;
    ScalarFn lagrangian;
    VectorFn dL_dq;
    VectorFn dL_dv;
    VectorFn force_Q;
    VectorFn acceleration;
    /// U(q) for models of mechanical type (kinetic minus potential); empty
    /// for models whose Lagrangian has no such split.
    std::function<double(const Vec&)> potential;
    std::map<std::string, double> params;

    double param(const std::string& key) const;
};

/// Variation data of a one-parameter family of perturbed motions at
/// parameter zero.  delta_q and delta_v receive the acceleration along the
/// flow because time-reparametrizing families need it for delta_v.
struct PerturbationFamily {
    std::string name;
    std::function<Vec(double, const Vec&, const Vec&, const Vec&)> delta_q;
    std::function<Vec(double, const Vec&, const Vec&, const Vec&)> delta_v;
};

/// The family with delta_q = delta_v = 0; its constant is identically the
/// boundary term at the base time.
PerturbationFamily zero_family();

/// Pairs a system with a perturbation family.  Along any solution of the
/// system, boundary_term(t) minus the accumulated integral of integrand(s)
/// from t0 to t is constant in t.
struct NonlocalConstant {
    SecondOrderSystem system;
    PerturbationFamily family;
    std::string label;

    /// dL_dv . delta_q, the local part of the constant.
    double boundary_term(const State& s) const;

    /// dL_dq . delta_q + dL_dv . delta_v + Q . delta_q, the density of the
    /// integral part.  Throws NonFiniteError if the value overflows.
    double integrand(const State& s) const;

    /// boundary_term(s) - acc, where acc is the running integral carried by
    /// the integrator.
    double value(const State& s, double acc) const;
};

/// Quadrature density co-integrated alongside a trajectory in addition to
/// the attached constants' integrands.
using QuadratureFn = ScalarFn;

/// Flat layout of the augmented first-order system:
/// y = [q(0..n), v(0..n), one accumulator per constant, one per extra
/// quadrature].
std::size_t augmented_size(std::size_t dim, std::size_t n_constants, std::size_t n_extras);

Vec pack_state(const State& s, std::size_t n_extras = 0);

State unpack_state(double t, std::span<const double> y, std::size_t dim, std::size_t n_constants);

/// Derivative of the augmented state: dq/dt = v, dv/dt = acceleration,
/// d(acc_i)/dt = integrand of constant i, then the extra quadratures.
/// Throws NonFiniteError when any component of the derivative is not finite.
void augmented_rhs(const SecondOrderSystem& system, std::span<const NonlocalConstant> constants,
                   std::span<const QuadratureFn> extras, double t, std::span<const double> y,
                   std::span<double> dy);

/// Fill dL_dq / dL_dv by central differences of the Lagrangian (step
/// 1e-6 * (1 + |x|) per coordinate).  Lower accuracy than analytic
/// derivatives; meant for user-defined models only.
void fill_fd_lagrangian_derivatives(SecondOrderSystem& system);

/// |d/dt dL_dv - dL_dq - Q| along the flow, with the time derivative taken
/// by central differences of step fd_step and the neighbouring states
/// advanced with the model's own acceleration.  Small values certify that
/// `acceleration` is consistent with (L, Q).
double euler_lagrange_residual(const SecondOrderSystem& system, const State& s,
                               double fd_step = 1e-5);

/// |delta_v - d/dt delta_q| along the flow, the defining relation between a
/// family's two variation fields, by central differences of step fd_step.
double family_consistency_residual(const SecondOrderSystem& system,
                                   const PerturbationFamily& family, const State& s,
                                   double fd_step = 1e-5);

}  // namespace nlcm
