#pragma once

#include <string>
#include <vector>

#include "nlcm/dynamics.hpp"

namespace nlcm {

/// Rotation in the (i, j) coordinate plane, counterclockwise:
/// delta_q has -q_j in slot i and q_i in slot j, and likewise on velocities.
PerturbationFamily rotation_family(std::size_t i, std::size_t j);

/// q(t + lambda): delta_q = v, delta_v = acceleration.  Meaningful for
/// autonomous Lagrangians (caller's responsibility).
PerturbationFamily time_shift_family();

/// exp(lambda) q(exp(-2 lambda) t), the scaling symmetry of homogeneous
/// degree -2 potentials: delta_q = q - 2t v, delta_v = -v - 2t a.
PerturbationFamily scaling_hom2_family();

/// q(t + lambda exp(kt/m)) for the linear-drag Lagrangian:
/// delta_q = exp(kt/m) v, delta_v = exp(kt/m) ((k/m) v + a).
PerturbationFamily visc_shift_family(double k, double m);

/// q(t + lambda exp(-a t)), a > 0, for quadratic drag:
/// delta_q = exp(-a t) v, delta_v = exp(-a t) (-a v + a_flow).
PerturbationFamily hyd_shift_family(double a);

/// (exp(l) q1, exp(l) q2, exp(-2l) q3): delta_q = (q1, q2, -2 q3),
/// delta_v likewise on velocities.
PerturbationFamily mb_aniso_scaling_family();

/// q + lambda (0, 0, 2 exp(ct)): delta_q = (0, 0, 2 exp(ct)),
/// delta_v = (0, 0, 2c exp(ct)).
PerturbationFamily mb_translation_family(double c);

/// Clockwise rotation of the (q1, q2) plane: delta_q = (q2, -q1, 0).
/// Opposite sign convention from rotation_family, kept distinct on purpose.
PerturbationFamily mb_rotation_family();

/// Family id templates understood by make_family:
/// rot:i,j  tshift  scale2  vshift  hshift:a  mb-scale  mb-trans  mb-rot
std::vector<std::string> family_id_templates();
std::string family_template_description(const std::string& tmpl);

/// Build a family from its string id.  vshift reads k_drag/m and mb-trans
/// reads c from the system's parameters.
PerturbationFamily make_family(const std::string& id, const SecondOrderSystem& system);

}  // namespace nlcm
