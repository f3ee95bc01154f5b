#include "nlcm/dynamics.hpp"

#include <cmath>
#include <string>

#include "nlcm/errors.hpp"

namespace nlcm {

double SecondOrderSystem::param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end())
        throw ContractViolation("model '" + id + "' has no parameter '" + key + "'");
    return it->second;
}

PerturbationFamily zero_family() {
    PerturbationFamily f;
    f.name = "zero";
    f.delta_q = [](double, const Vec& q, const Vec&, const Vec&) { return zeros(q.size()); };
    f.delta_v = [](double, const Vec& q, const Vec&, const Vec&) { return zeros(q.size()); };
    return f;
}

namespace {

void require_dim(const SecondOrderSystem& sys, const State& s, const char* what) {
    if (s.dim() != sys.dim)
        throw ContractViolation(std::string(what) + ": state dimension " +
                                std::to_string(s.dim()) + " does not match system '" + sys.id +
                                "' dimension " + std::to_string(sys.dim));
}

}  // namespace

double NonlocalConstant::boundary_term(const State& s) const {
    require_dim(system, s, "boundary_term");
    const Vec a = system.acceleration(s.t, s.q, s.v);
    const Vec dq = family.delta_q(s.t, s.q, s.v, a);
    const Vec dldv = system.dL_dv(s.t, s.q, s.v);
    return dot(dldv, dq);
}

double NonlocalConstant::integrand(const State& s) const {
    require_dim(system, s, "integrand");
    const Vec a = system.acceleration(s.t, s.q, s.v);
    const Vec dq = family.delta_q(s.t, s.q, s.v, a);
    const Vec dv = family.delta_v(s.t, s.q, s.v, a);
    const double m = dot(system.dL_dq(s.t, s.q, s.v), dq) +
                     dot(system.dL_dv(s.t, s.q, s.v), dv) + dot(system.force_Q(s.t, s.q, s.v), dq);
    if (!std::isfinite(m))
        throw NonFiniteError("non-finite integrand of constant '" + label + "' at t=" +
                                 std::to_string(s.t),
                             s.t);
    return m;
}

double NonlocalConstant::value(const State& s, double acc) const {
    return boundary_term(s) - acc;
}

std::size_t augmented_size(std::size_t dim, std::size_t n_constants, std::size_t n_extras) {
    return 2 * dim + n_constants + n_extras;
}

Vec pack_state(const State& s, std::size_t n_extras) {
    Vec y;
    y.reserve(augmented_size(s.dim(), s.acc_integrals.size(), n_extras));
    y.insert(y.end(), s.q.begin(), s.q.end());
    y.insert(y.end(), s.v.begin(), s.v.end());
    y.insert(y.end(), s.acc_integrals.begin(), s.acc_integrals.end());
    y.insert(y.end(), n_extras, 0.0);
    return y;
}

State unpack_state(double t, std::span<const double> y, std::size_t dim,
                   std::size_t n_constants) {
    if (y.size() < 2 * dim + n_constants)
        throw ContractViolation("flat vector of size " + std::to_string(y.size()) +
                                " too small for dim " + std::to_string(dim) + " with " +
                                std::to_string(n_constants) + " accumulators");
    State s;
    s.t = t;
    s.q.assign(y.begin(), y.begin() + dim);
    s.v.assign(y.begin() + dim, y.begin() + 2 * dim);
    s.acc_integrals.assign(y.begin() + 2 * dim, y.begin() + 2 * dim + n_constants);
    return s;
}

void augmented_rhs(const SecondOrderSystem& system, std::span<const NonlocalConstant> constants,
                   std::span<const QuadratureFn> extras, double t, std::span<const double> y,
                   std::span<double> dy) {
    const std::size_t n = system.dim;
    if (y.size() != augmented_size(n, constants.size(), extras.size()) || dy.size() != y.size())
        throw ContractViolation("augmented_rhs: flat vector size mismatch");
    const State s = unpack_state(t, y, n, constants.size());
    const Vec a = system.acceleration(t, s.q, s.v);
    for (std::size_t i = 0; i < n; ++i) {
        dy[i] = s.v[i];
        dy[n + i] = a[i];
    }
    for (std::size_t c = 0; c < constants.size(); ++c) dy[2 * n + c] = constants[c].integrand(s);
    for (std::size_t e = 0; e < extras.size(); ++e)
        dy[2 * n + constants.size() + e] = extras[e](t, s.q, s.v);
    if (!all_finite(dy))
        throw NonFiniteError("non-finite derivative at t=" + std::to_string(t), t);
}

void fill_fd_lagrangian_derivatives(SecondOrderSystem& system) {
    const ScalarFn L = system.lagrangian;
    auto central = [L](double t, const Vec& q, const Vec& v, bool wrt_q) {
        Vec g(q.size());
        Vec qp = q, vp = v;
        Vec& x = wrt_q ? qp : vp;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double x0 = x[i];
            const double h = 1e-6 * (1.0 + std::abs(x0));
            x[i] = x0 + h;
            const double fp = L(t, qp, vp);
            x[i] = x0 - h;
            const double fm = L(t, qp, vp);
            x[i] = x0;
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    };
    system.dL_dq = [central](double t, const Vec& q, const Vec& v) {
        return central(t, q, v, true);
    };
    system.dL_dv = [central](double t, const Vec& q, const Vec& v) {
        return central(t, q, v, false);
    };
}

namespace {

// State advanced to t +/- h along the local flow: q to second order, v to
// first order in h.  Good enough for fd_step ~ 1e-5 under 1e-4 tolerances.
State nudged(const State& s, const Vec& a, double h) {
    State r = s;
    r.t = s.t + h;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        r.q[i] = s.q[i] + h * s.v[i] + 0.5 * h * h * a[i];
        r.v[i] = s.v[i] + h * a[i];
    }
    return r;
}

}  // namespace

double euler_lagrange_residual(const SecondOrderSystem& system, const State& s, double fd_step) {
    const Vec a = system.acceleration(s.t, s.q, s.v);
    const State sp = nudged(s, a, fd_step);
    const State sm = nudged(s, a, -fd_step);
    const Vec pp = system.dL_dv(sp.t, sp.q, sp.v);
    const Vec pm = system.dL_dv(sm.t, sm.q, sm.v);
    const Vec dldq = system.dL_dq(s.t, s.q, s.v);
    const Vec q_force = system.force_Q(s.t, s.q, s.v);
    double worst = 0.0;
    for (std::size_t i = 0; i < system.dim; ++i) {
        const double dpdt = (pp[i] - pm[i]) / (2.0 * fd_step);
        worst = std::max(worst, std::abs(dpdt - dldq[i] - q_force[i]));
    }
    return worst;
}

double family_consistency_residual(const SecondOrderSystem& system,
                                   const PerturbationFamily& family, const State& s,
                                   double fd_step) {
    const Vec a = system.acceleration(s.t, s.q, s.v);
    const State sp = nudged(s, a, fd_step);
    const State sm = nudged(s, a, -fd_step);
    const Vec ap = system.acceleration(sp.t, sp.q, sp.v);
    const Vec am = system.acceleration(sm.t, sm.q, sm.v);
    const Vec dqp = family.delta_q(sp.t, sp.q, sp.v, ap);
    const Vec dqm = family.delta_q(sm.t, sm.q, sm.v, am);
    const Vec dv = family.delta_v(s.t, s.q, s.v, a);
    double worst = 0.0;
    for (std::size_t i = 0; i < system.dim; ++i)
        worst = std::max(worst, std::abs((dqp[i] - dqm[i]) / (2.0 * fd_step) - dv[i]));
    return worst;
}

}  // namespace nlcm
