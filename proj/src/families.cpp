#include "nlcm/families.hpp"

#include <cmath>

#include "nlcm/errors.hpp"

namespace nlcm {

PerturbationFamily rotation_family(std::size_t i, std::size_t j) {
    if (i >= j) throw ContractViolation("rotation family needs plane indices i < j");
    auto spin = [i, j](const Vec& x) {
        if (j >= x.size())
            throw ContractViolation("rotation plane (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") out of range for dimension " +
                                    std::to_string(x.size()));
        Vec d(x.size(), 0.0);
        d[i] = -x[j];
        d[j] = x[i];
        return d;
    };
    PerturbationFamily f;
    f.name = "rot:" + std::to_string(i) + "," + std::to_string(j);
    f.delta_q = [spin](double, const Vec& q, const Vec&, const Vec&) { return spin(q); };
    f.delta_v = [spin](double, const Vec&, const Vec& v, const Vec&) { return spin(v); };
    return f;
}

PerturbationFamily time_shift_family() {
    PerturbationFamily f;
    f.name = "tshift";
    f.delta_q = [](double, const Vec&, const Vec& v, const Vec&) { return v; };
    f.delta_v = [](double, const Vec&, const Vec&, const Vec& a) { return a; };
    return f;
}

PerturbationFamily scaling_hom2_family() {
    PerturbationFamily f;
    f.name = "scale2";
    // d/dl [e^l q(e^{-2l} t)] at l=0 is q - 2t qdot; one more time
    // derivative of the family gives -qdot - 2t qddot.
    f.delta_q = [](double t, const Vec& q, const Vec& v, const Vec&) {
        Vec d(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) d[i] = q[i] - 2.0 * t * v[i];
        return d;
    };
    f.delta_v = [](double t, const Vec&, const Vec& v, const Vec& a) {
        Vec d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = -v[i] - 2.0 * t * a[i];
        return d;
    };
    return f;
}

PerturbationFamily visc_shift_family(double k, double m) {
    if (!(m > 0)) throw ContractViolation("visc_shift family needs m > 0");
    PerturbationFamily f;
    f.name = "vshift";
    const double rate = k / m;
    f.delta_q = [rate](double t, const Vec&, const Vec& v, const Vec&) {
        const double w = std::exp(rate * t);
        Vec d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = w * v[i];
        return d;
    };
    f.delta_v = [rate](double t, const Vec&, const Vec& v, const Vec& a) {
        const double w = std::exp(rate * t);
        Vec d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = w * (rate * v[i] + a[i]);
        return d;
    };
    return f;
}

PerturbationFamily hyd_shift_family(double a) {
    if (!(a > 0)) throw ContractViolation("hyd_shift family needs a > 0");
    PerturbationFamily f;
    f.name = "hshift:" + std::to_string(a);
    f.delta_q = [a](double t, const Vec&, const Vec& v, const Vec&) {
        const double w = std::exp(-a * t);
        Vec d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = w * v[i];
        return d;
    };
    f.delta_v = [a](double t, const Vec&, const Vec& v, const Vec& acc) {
        const double w = std::exp(-a * t);
        Vec d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = w * (-a * v[i] + acc[i]);
        return d;
    };
    return f;
}

namespace {

void require_dim3(const Vec& x, const char* fam) {
    if (x.size() != 3)
        throw ContractViolation(std::string(fam) + " family needs a three-dimensional system");
}

}  // namespace

PerturbationFamily mb_aniso_scaling_family() {
    auto stretch = [](const Vec& x) {
        require_dim3(x, "mb-scale");
        return Vec{x[0], x[1], -2.0 * x[2]};
    };
    PerturbationFamily f;
    f.name = "mb-scale";
    f.delta_q = [stretch](double, const Vec& q, const Vec&, const Vec&) { return stretch(q); };
    f.delta_v = [stretch](double, const Vec&, const Vec& v, const Vec&) { return stretch(v); };
    return f;
}

PerturbationFamily mb_translation_family(double c) {
    PerturbationFamily f;
    f.name = "mb-trans";
    f.delta_q = [c](double t, const Vec& q, const Vec&, const Vec&) {
        require_dim3(q, "mb-trans");
        return Vec{0.0, 0.0, 2.0 * std::exp(c * t)};
    };
    f.delta_v = [c](double t, const Vec& q, const Vec&, const Vec&) {
        require_dim3(q, "mb-trans");
        return Vec{0.0, 0.0, 2.0 * c * std::exp(c * t)};
    };
    return f;
}

PerturbationFamily mb_rotation_family() {
    auto spin = [](const Vec& x) {
        require_dim3(x, "mb-rot");
        return Vec{x[1], -x[0], 0.0};
    };
    PerturbationFamily f;
    f.name = "mb-rot";
    f.delta_q = [spin](double, const Vec& q, const Vec&, const Vec&) { return spin(q); };
    f.delta_v = [spin](double, const Vec&, const Vec& v, const Vec&) { return spin(v); };
    return f;
}

std::vector<std::string> family_id_templates() {
    return {"rot:i,j", "tshift", "scale2", "vshift", "hshift:a", "mb-scale", "mb-trans",
            "mb-rot"};
}

std::string family_template_description(const std::string& tmpl) {
    if (tmpl == "rot:i,j") return "plane rotation; yields the angular momentum in plane (i,j)";
    if (tmpl == "tshift") return "time shift; yields the energy for autonomous Lagrangians";
    if (tmpl == "scale2")
        return "scaling symmetry of homogeneous degree -2 potentials; yields K = m v.q - 2tE";
    if (tmpl == "vshift")
        return "exponential time shift matched to linear drag (uses model k_drag, m)";
    if (tmpl == "hshift:a") return "exponential time shift exp(-a t) for quadratic drag";
    if (tmpl == "mb-scale")
        return "anisotropic Maxwell-Bloch scaling (q1,q2,-2q3); generates the fish equation";
    if (tmpl == "mb-trans")
        return "q3 translation by 2 exp(ct) (uses model c); yields the integral M when c = 2a";
    if (tmpl == "mb-rot") return "clockwise (q1,q2) rotation; yields N = exp((a+b)t) r^2 thdot";
    throw ContractViolation("unknown family template '" + tmpl + "'");
}

PerturbationFamily make_family(const std::string& id, const SecondOrderSystem& system) {
    if (id == "tshift") return time_shift_family();
    if (id == "scale2") return scaling_hom2_family();
    if (id == "vshift") return visc_shift_family(system.param("k_drag"), system.param("m"));
    if (id == "mb-scale") return mb_aniso_scaling_family();
    if (id == "mb-trans") return mb_translation_family(system.param("c"));
    if (id == "mb-rot") return mb_rotation_family();
    if (id.rfind("rot:", 0) == 0) {
        const auto comma = id.find(',', 4);
        if (comma == std::string::npos)
            throw ContractViolation("rotation family id must look like rot:i,j");
        try {
            const int i = std::stoi(id.substr(4, comma - 4));
            const int j = std::stoi(id.substr(comma + 1));
            if (i < 0 || j < 0) throw ContractViolation("rotation plane indices must be >= 0");
            return rotation_family(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        } catch (const std::logic_error&) {
            throw ContractViolation("rotation family id must look like rot:i,j");
        }
    }
    if (id.rfind("hshift:", 0) == 0) {
        try {
            return hyd_shift_family(std::stod(id.substr(7)));
        } catch (const std::logic_error&) {
            throw ContractViolation("hshift family id must look like hshift:a with a > 0");
        }
    }
    throw ContractViolation("unknown family id '" + id + "'");
}

}  // namespace nlcm
