#include "nlcm/models.hpp"

#include <cmath>
#include <limits>

#include "nlcm/errors.hpp"

namespace nlcm {

Potential zero_potential() {
    Potential p;
    p.id = "zero";
    p.value = [](const Vec&) { return 0.0; };
    p.grad = [](const Vec& q) { return zeros(q.size()); };
    p.sup = 0.0;
    return p;
}

Potential harmonic_potential(double stiffness) {
    Potential p;
    p.id = "harmonic";
    p.value = [stiffness](const Vec& q) { return 0.5 * stiffness * norm2(q); };
    p.grad = [stiffness](const Vec& q) {
        Vec g(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) g[i] = stiffness * q[i];
        return g;
    };
    return p;
}

Potential bump_potential(double u0) {
    Potential p;
    p.id = "bump";
    p.value = [u0](const Vec& q) { return u0 / (1.0 + norm2(q)); };
    p.grad = [u0](const Vec& q) {
        const double d = 1.0 + norm2(q);
        Vec g(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) g[i] = -2.0 * u0 * q[i] / (d * d);
        return g;
    };
    p.sup = u0;
    return p;
}

namespace {

// Mechanical system L = m|v|^2/2 - U(q) with generalized force Q.
SecondOrderSystem mechanical(std::string id, std::size_t n, double m, Potential U, VectorFn Q,
                             VectorFn drag_accel) {
    SecondOrderSystem sys;
    sys.id = std::move(id);
    sys.dim = n;
    sys.params["m"] = m;
    auto pot = U;  // keep U alive in every closure
    sys.lagrangian = [m, pot](double, const Vec& q, const Vec& v) {
        return 0.5 * m * norm2(v) - pot.value(q);
    };
    sys.dL_dq = [pot](double, const Vec& q, const Vec&) {
        Vec g = pot.grad(q);
        for (double& x : g) x = -x;
        return g;
    };
    sys.dL_dv = [m](double, const Vec&, const Vec& v) {
        Vec p(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) p[i] = m * v[i];
        return p;
    };
    sys.force_Q = std::move(Q);
    sys.acceleration = std::move(drag_accel);
    sys.potential = [pot](const Vec& q) { return pot.value(q); };
    return sys;
}

}  // namespace

SecondOrderSystem make_central_inverse_square(const CentralInverseSquareParams& p) {
    if (p.n < 2) throw ContractViolation("central inverse-square model needs dimension >= 2");
    if (!(p.m > 0)) throw ContractViolation("central inverse-square model needs m > 0");
    const double k = p.k_pot;
    Potential U;
    U.id = "central_inv2";
    U.value = [k](const Vec& q) {
        const double r2 = norm2(q);
        if (r2 == 0.0) throw SingularConfiguration("inverse-square potential evaluated at q=0");
        return -k / r2;
    };
    U.grad = [k](const Vec& q) {
        const double r2 = norm2(q);
        if (r2 == 0.0) throw SingularConfiguration("inverse-square potential evaluated at q=0");
        Vec g(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) g[i] = 2.0 * k * q[i] / (r2 * r2);
        return g;
    };
    const double m = p.m;
    auto pot = U;
    auto accel = [m, pot](double, const Vec& q, const Vec&) {
        Vec g = pot.grad(q);
        for (double& x : g) x = -x / m;
        return g;
    };
    auto sys = mechanical("central2", p.n, p.m, U,
                          [](double, const Vec& q, const Vec&) { return zeros(q.size()); },
                          accel);
    sys.params["k_pot"] = p.k_pot;
    return sys;
}

SecondOrderSystem make_calogero(const CalogeroParams& p) {
    if (p.n < 2) throw ContractViolation("Calogero model needs at least two particles");
    if (!(p.m > 0) || !(p.g2 > 0))
        throw ContractViolation("Calogero model needs m > 0 and g2 > 0");
    const double g2 = p.g2;
    Potential U;
    U.id = "calogero";
    U.value = [g2](const Vec& q) {
        double u = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j)
            for (std::size_t k = j + 1; k < q.size(); ++k) {
                const double d = q[j] - q[k];
                if (d == 0.0)
                    throw SingularConfiguration("Calogero potential with coinciding coordinates");
                u += g2 / (d * d);
            }
        return u;
    };
    U.grad = [g2](const Vec& q) {
        Vec g(q.size(), 0.0);
        for (std::size_t j = 0; j < q.size(); ++j)
            for (std::size_t k = 0; k < q.size(); ++k) {
                if (k == j) continue;
                const double d = q[j] - q[k];
                if (d == 0.0)
                    throw SingularConfiguration("Calogero potential with coinciding coordinates");
                g[j] += -2.0 * g2 / (d * d * d);
            }
        return g;
    };
    const double m = p.m;
    auto pot = U;
    auto accel = [m, pot](double, const Vec& q, const Vec&) {
        Vec g = pot.grad(q);
        for (double& x : g) x = -x / m;
        return g;
    };
    auto sys = mechanical("calogero", p.n, p.m, U,
                          [](double, const Vec& q, const Vec&) { return zeros(q.size()); },
                          accel);
    sys.params["g2"] = p.g2;
    return sys;
}

SecondOrderSystem make_viscous(const ViscousParams& p) {
    if (!(p.m > 0) || !(p.k_drag > 0))
        throw ContractViolation("viscous model needs m > 0 and k_drag > 0");
    const double m = p.m, k = p.k_drag;
    auto pot = p.U;
    SecondOrderSystem sys;
    sys.id = "viscous";
    sys.dim = p.n;
    // L = exp(kt/m) (m|v|^2/2 - U): the exponential weight absorbs the drag,
    // leaving Q identically zero.
    sys.lagrangian = [m, k, pot](double t, const Vec& q, const Vec& v) {
        return std::exp(k * t / m) * (0.5 * m * norm2(v) - pot.value(q));
    };
    sys.dL_dq = [m, k, pot](double t, const Vec& q, const Vec&) {
        Vec g = pot.grad(q);
        const double w = std::exp(k * t / m);
        for (double& x : g) x = -w * x;
        return g;
    };
    sys.dL_dv = [m, k](double t, const Vec&, const Vec& v) {
        const double w = std::exp(k * t / m);
        Vec pmom(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) pmom[i] = w * m * v[i];
        return pmom;
    };
    sys.force_Q = [](double, const Vec& q, const Vec&) { return zeros(q.size()); };
    sys.acceleration = [m, k, pot](double, const Vec& q, const Vec& v) {
        Vec a = pot.grad(q);
        for (std::size_t i = 0; i < q.size(); ++i) a[i] = (-k * v[i] - a[i]) / m;
        return a;
    };
    sys.potential = [pot](const Vec& q) { return pot.value(q); };
    sys.params["m"] = m;
    sys.params["k_drag"] = k;
    return sys;
}

SecondOrderSystem make_hydraulic(const HydraulicParams& p) {
    if (!(p.m > 0) || !(p.k_drag > 0))
        throw ContractViolation("hydraulic model needs m > 0 and k_drag > 0");
    if (!(p.U.sup < std::numeric_limits<double>::infinity()))
        throw ContractViolation("hydraulic model needs a bounded potential (finite sup)");
    const double m = p.m, k = p.k_drag;
    auto pot = p.U;
    auto drag = [m, k, pot](double, const Vec& q, const Vec& v) {
        Vec a = pot.grad(q);
        const double speed = norm(v);
        for (std::size_t i = 0; i < q.size(); ++i) a[i] = (-k * speed * v[i] - a[i]) / m;
        return a;
    };
    auto force = [k](double, const Vec&, const Vec& v) {
        const double speed = norm(v);
        Vec f(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) f[i] = -k * speed * v[i];
        return f;
    };
    auto sys = mechanical("hydraulic", p.n, m, pot, force, drag);
    sys.params["k_drag"] = k;
    sys.params["u_sup"] = pot.sup;
    return sys;
}

SecondOrderSystem make_maxwell_bloch(const MaxwellBlochParams& p) {
    if (!(p.g > 0)) throw ContractViolation("Maxwell-Bloch model needs g > 0");
    if (p.a < 0 || p.b < 0 || p.c < 0)
        throw ContractViolation("Maxwell-Bloch model needs a, b, c >= 0");
    const double a = p.a, b = p.b, c = p.c, g = p.g, k = p.k_pump;
    const double g2 = g * g;
    SecondOrderSystem sys;
    sys.id = "maxwell_bloch";
    sys.dim = 3;
    // L = (v1^2 + v2^2 + g^2 v3^2 + (q1^2+q2^2)(g^2 v3 - ab)) / 2.  The v3
    // cross term makes dL_dv3 = g^2 v3 + g^2 (q1^2+q2^2)/2; locked by the
    // finite-difference consistency test.
    sys.lagrangian = [g2, a, b](double, const Vec& q, const Vec& v) {
        const double r2 = q[0] * q[0] + q[1] * q[1];
        return 0.5 * (v[0] * v[0] + v[1] * v[1] + g2 * v[2] * v[2] + r2 * (g2 * v[2] - a * b));
    };
    sys.dL_dq = [g2, a, b](double, const Vec& q, const Vec& v) {
        const double w = g2 * v[2] - a * b;
        return Vec{q[0] * w, q[1] * w, 0.0};
    };
    sys.dL_dv = [g2](double, const Vec& q, const Vec& v) {
        const double r2 = q[0] * q[0] + q[1] * q[1];
        return Vec{v[0], v[1], g2 * v[2] + 0.5 * g2 * r2};
    };
    sys.force_Q = [a, b, c, g2, k](double, const Vec& q, const Vec& v) {
        const double r2 = q[0] * q[0] + q[1] * q[1];
        return Vec{-(a + b) * v[0], -(a + b) * v[1], -(a * g2 * r2 + c * g2 * (v[2] - k))};
    };
    sys.acceleration = [a, b, c, g2, k](double, const Vec& q, const Vec& v) {
        const double r2 = q[0] * q[0] + q[1] * q[1];
        return Vec{-a * b * q[0] - (a + b) * v[0] + g2 * q[0] * v[2],
                   -a * b * q[1] - (a + b) * v[1] + g2 * q[1] * v[2],
                   -a * r2 - c * (v[2] - k) - (q[0] * v[0] + q[1] * v[1])};
    };
    sys.params = {{"a", a}, {"b", b}, {"c", c}, {"g", g}, {"k_pump", k}};
    return sys;
}

SecondOrderSystem make_harmonic_oscillator(double m, double stiffness, std::size_t n) {
    auto pot = harmonic_potential(stiffness);
    auto accel = [m, pot](double, const Vec& q, const Vec&) {
        Vec g = pot.grad(q);
        for (double& x : g) x = -x / m;
        return g;
    };
    auto sys = mechanical("harmonic", n, m, pot,
                          [](double, const Vec& q, const Vec&) { return zeros(q.size()); },
                          accel);
    sys.params["stiffness"] = stiffness;
    return sys;
}

SecondOrderSystem make_free_particle(double m, std::size_t n) {
    return mechanical("free", n, m, zero_potential(),
                      [](double, const Vec& q, const Vec&) { return zeros(q.size()); },
                      [](double, const Vec& q, const Vec&) { return zeros(q.size()); });
}

std::vector<std::string> model_preset_ids() {
    return {"central2", "calogero", "viscous", "hydraulic", "mb-cons", "mb-diss"};
}

std::string model_preset_description(const std::string& id) {
    if (id == "central2")
        return "point mass in the attractive inverse-square potential U = -k_pot/|q|^2 (n >= 2)";
    if (id == "calogero")
        return "n particles on a line with pairwise inverse-square repulsion g2/(q_j-q_k)^2";
    if (id == "viscous")
        return "particle with linear drag -k_drag*v in a harmonic potential";
    if (id == "hydraulic")
        return "particle with quadratic drag -k_drag*|v|v in the bounded bump potential "
               "u0/(1+|q|^2)";
    if (id == "mb-cons") return "resonant Maxwell-Bloch laser system, conservative (a=b=c=0)";
    if (id == "mb-diss")
        return "resonant Maxwell-Bloch laser system, dissipative (defaults a=b=1, c=2a, "
               "k_pump=2)";
    throw ContractViolation("unknown model preset '" + id + "'");
}

namespace {

double take(std::map<std::string, double>& m, const std::string& key, double dflt) {
    auto it = m.find(key);
    if (it == m.end()) return dflt;
    const double v = it->second;
    m.erase(it);
    return v;
}

void reject_leftovers(const std::map<std::string, double>& m, const std::string& id) {
    if (!m.empty())
        throw ContractViolation("model preset '" + id + "' does not accept parameter '" +
                                m.begin()->first + "'");
}

}  // namespace

SecondOrderSystem make_model_preset(const std::string& id, std::size_t dim,
                                    const std::map<std::string, double>& overrides) {
    std::map<std::string, double> ov = overrides;
    SecondOrderSystem sys;
    if (id == "central2") {
        CentralInverseSquareParams p;
        p.n = dim ? dim : p.n;
        p.m = take(ov, "m", p.m);
        p.k_pot = take(ov, "k_pot", p.k_pot);
        reject_leftovers(ov, id);
        sys = make_central_inverse_square(p);
    } else if (id == "calogero") {
        CalogeroParams p;
        p.n = dim ? dim : p.n;
        p.m = take(ov, "m", p.m);
        p.g2 = take(ov, "g2", p.g2);
        reject_leftovers(ov, id);
        sys = make_calogero(p);
    } else if (id == "viscous") {
        ViscousParams p;
        p.m = take(ov, "m", p.m);
        p.k_drag = take(ov, "k_drag", p.k_drag);
        p.U = harmonic_potential(take(ov, "stiffness", 1.0));
        p.n = dim ? dim : p.n;
        reject_leftovers(ov, id);
        sys = make_viscous(p);
    } else if (id == "hydraulic") {
        HydraulicParams p;
        p.m = take(ov, "m", p.m);
        p.k_drag = take(ov, "k_drag", p.k_drag);
        p.U = bump_potential(take(ov, "u0", 1.0));
        if (p.U.sup == 0.0) p.U = zero_potential();
        p.n = dim ? dim : p.n;
        reject_leftovers(ov, id);
        sys = make_hydraulic(p);
    } else if (id == "mb-cons" || id == "mb-diss") {
        MaxwellBlochParams p;
        if (id == "mb-diss") {
            p.a = 1.0;
            p.b = 1.0;
            p.c = 2.0;
            p.k_pump = 2.0;
        }
        p.a = take(ov, "a", p.a);
        p.b = take(ov, "b", p.b);
        p.c = take(ov, "c", p.c);
        p.g = take(ov, "g", p.g);
        p.k_pump = take(ov, "k_pump", p.k_pump);
        reject_leftovers(ov, id);
        if (id == "mb-cons" && (p.a != 0.0 || p.b != 0.0 || p.c != 0.0))
            throw ContractViolation("preset mb-cons requires a = b = c = 0");
        if (id == "mb-diss" && !(p.a > 0 && p.b > 0 && p.c > 0))
            throw ContractViolation("preset mb-diss requires a, b, c > 0");
        if (dim && dim != 3)
            throw ContractViolation("Maxwell-Bloch presets are three-dimensional");
        sys = make_maxwell_bloch(p);
        sys.id = id;
        return sys;
    } else {
        throw ContractViolation("unknown model preset '" + id + "'");
    }
    return sys;
}

}  // namespace nlcm
