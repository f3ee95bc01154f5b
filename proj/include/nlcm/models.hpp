#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "nlcm/dynamics.hpp"

namespace nlcm {

/// Scalar potential with analytic gradient.  `sup` is the least known upper
/// bound (infinity when unbounded); models that need boundedness record it.
struct Potential {
    std::string id;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    double sup = std::numeric_limits<double>::infinity();
};

Potential zero_potential();
Potential harmonic_potential(double stiffness = 1.0);
/// u0 / (1 + |q|^2): smooth, 0 <= U <= u0, sup attained at the origin.
Potential bump_potential(double u0);

struct CentralInverseSquareParams {
    double m = 1.0;
    double k_pot = 0.5;  // U(q) = -k_pot / |q|^2
    std::size_t n = 2;
};

struct CalogeroParams {
    double g2 = 1.0;  // U = g2 * sum_{j<k} (q_j - q_k)^-2
    double m = 1.0;
    std::size_t n = 3;
};

struct ViscousParams {
    double m = 1.0;
    double k_drag = 1.0;
    Potential U = harmonic_potential();
    std::size_t n = 2;
};

struct HydraulicParams {
    double m = 1.0;
    double k_drag = 1.0;
    Potential U = bump_potential(1.0);  // must satisfy 0 <= U <= U.sup
    std::size_t n = 2;
};

struct MaxwellBlochParams {
    double a = 0.0, b = 0.0, c = 0.0;
    double g = 1.0;
    double k_pump = 0.0;
};

SecondOrderSystem make_central_inverse_square(const CentralInverseSquareParams& p);
SecondOrderSystem make_calogero(const CalogeroParams& p);
SecondOrderSystem make_viscous(const ViscousParams& p);
SecondOrderSystem make_hydraulic(const HydraulicParams& p);
SecondOrderSystem make_maxwell_bloch(const MaxwellBlochParams& p);

/// Conservative workhorses used by integrator quality checks and tests.
SecondOrderSystem make_harmonic_oscillator(double m = 1.0, double stiffness = 1.0,
                                           std::size_t n = 1);
SecondOrderSystem make_free_particle(double m = 1.0, std::size_t n = 1);

/// Preset ids: central2, calogero, viscous, hydraulic, mb-cons, mb-diss.
std::vector<std::string> model_preset_ids();
std::string model_preset_description(const std::string& id);

/// Instantiate a preset at the given dimension (0 = preset default) with
/// numeric parameter overrides.  Unknown ids or parameters throw
/// ContractViolation.
SecondOrderSystem make_model_preset(const std::string& id, std::size_t dim,
                                    const std::map<std::string, double>& overrides = {});

}  // namespace nlcm
