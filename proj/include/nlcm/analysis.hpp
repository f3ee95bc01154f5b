#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>

#include "nlcm/integrate.hpp"

namespace nlcm {

/// Drift of a scalar quantity along a trajectory, measured against its value
/// at the base time.  max_rel divides each per-sample deviation by a
/// per-sample scale (1 + the magnitudes entering the evaluation at that
/// sample), so exponentially weighted quantities are compared against the
/// size of the terms they are built from rather than against their tiny
/// cancellation value.
struct DriftReport {
    double value_t0 = 0.0;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double scale_max = 1.0;
};

/// Drift of attached constant `idx` over the trajectory; per-sample scale is
/// 1 + |C(t0)| + |boundary(t)| + |integral(t)|.
DriftReport constant_drift(const Trajectory& traj, std::size_t idx);

/// Drift of an arbitrary scalar sample function with scale 1 + |c(t0)|.
DriftReport series_drift(const Trajectory& traj,
                         const std::function<double(const Sample&)>& c);

/// Largest |integrand| over the samples of a trajectory (symmetry checks:
/// an invariant Lagrangian makes the integrand vanish identically).
double max_abs_integrand(const Trajectory& traj, const NonlocalConstant& nc);

/// Drift of (constant value - generalized energy dL_dv.v - L); for an
/// autonomous Lagrangian paired with the time-shift family this difference
/// is the constant L(t0).
DriftReport energy_shift_drift(const Trajectory& traj, const SecondOrderSystem& system,
                               std::size_t tshift_idx);

// --- homogeneous degree -2 potentials -------------------------------------

struct Hom2Integrals {
    double E = 0.0;   // m|v|^2/2 + U(q)
    double K = 0.0;   // m v.q - 2 t E
    double K1 = 0.0;  // m|q|^2/2 - t^2 E - t K
};

/// Evaluate the three integrals at a state of a homogeneous degree -2 model
/// (the model must expose its potential).
Hom2Integrals hom2_integrals(const SecondOrderSystem& system, const State& s);

/// max over samples of | |q(t)|^2 - (2/m)(t^2 E + t K + K1) |, the square of
/// the radial distance law.
double radial_law_residual(const Trajectory& traj, const Hom2Integrals& integrals, double m);

// --- linear (viscous) drag -------------------------------------------------

struct ViscousBoundReport {
    bool monotone_ok = true;       // exp(2kt/m)(m|v|^2 + 2U) non-decreasing in t
    double max_decrease = 0.0;     // worst backward step of the monotone quantity
    double first_violation_t = 0.0;
    bool past_bound_ok = true;     // m e^{2kt/m}|v|^2 <= value of the monotone
    double max_bound_excess = 0.0; // quantity at the base time, for t <= t0
    double scale = 1.0;
};

ViscousBoundReport viscous_bound_check(const Trajectory& traj, double k, double m,
                                       const std::function<double(const Vec&)>& U,
                                       double tol_factor = 1e-8);

// --- quadratic (hydraulic) drag ---------------------------------------------

/// Density of the integral term of the rewritten drag identity:
/// e^{-a s} (2k|v|^3 + a m |v|^2 + 2 a U(q)) / 2.  Attach as an extra
/// quadrature, then check the identity with hydraulic_invariant_drift.
QuadratureFn hydraulic_invariant_quadrature(double a, double m, double k,
                                            std::function<double(const Vec&)> U);

/// Drift of
///   m/2 e^{-at}|v|^2 + e^{-at}U(q) - e^{-at0}U(q(t0)) + (quadrature)
/// against its value m/2 e^{-at0}|v(t0)|^2 at the base time.
DriftReport hydraulic_invariant_drift(const Trajectory& traj, std::size_t extra_idx, double a,
                                      double m, const std::function<double(const Vec&)>& U);

/// Lower-bound comparison solution for |v|^2 in backward time:
/// z' = -(2/m)(k z^{3/2} - a U_sup), z(t0) = z0.  Values at the requested
/// times (monotone from t0).  Throws PreconditionError when
/// k z0^{3/2} <= a U_sup (the comparison solution would not blow up).
Vec comparison_z_at(std::span<const double> times, double t0, double z0, double a, double m,
                    double k, double u_sup, const IntegratorConfig& cfg = {});

double comparison_z(double t, double t0, double z0, double a, double m, double k, double u_sup,
                    const IntegratorConfig& cfg = {});

/// t* - t0 < 0: backward explosion time of the comparison solution, from the
/// integral of du / (k u^{3/2} - a U_sup) over [z0, infinity), computed with
/// the substitution u = w^-2 and adaptive quadrature (relative 1e-8).
double explosion_time_offset(double z0, double a, double m, double k, double u_sup);

struct BlowupReport {
    double t_star = 0.0;    // comparison-solution explosion time
    double t_detect = 0.0;  // numerically detected blow-up time (backward)
    bool condition_satisfied = false;  // strict initial-speed condition for the given a
    double z0 = 0.0;
    RunStatus status = RunStatus::Completed;
    bool conclusive = false;  // blow-up actually observed
};

/// Integrate a quadratic-drag model backward until blow-up and compare the
/// detected time with the comparison solution's explosion time.  Requires
/// kinetic energy strictly above the potential's sup, and a small enough
/// that the comparison solution explodes.  t_end defaults to t_star.
BlowupReport blowup_experiment(const SecondOrderSystem& hydraulic, const State& s0, double a,
                               const IntegratorConfig& cfg, Trajectory* out_traj = nullptr,
                               Vec* out_z = nullptr,
                               double t_end = std::numeric_limits<double>::quiet_NaN());

// --- Maxwell-Bloch -----------------------------------------------------------

enum class MBRegime { Conservative, DissipativeM };

struct MBConservedSet {
    double E_mb = 0.0;  // (v1^2 + v2^2 + g^2 v3^2)/2
    double B = 0.0;     // v3 + (q1^2 + q2^2)/2
    double M_int = 0.0; // e^{2at}(q1^2 + q2^2 + 2 v3 - 2 k)
    double N_int = 0.0; // e^{(a+b)t}(q1 v2 - q2 v1)
};

/// Evaluate the conserved set at a state.  Conservative regime requires
/// a = b = c = 0; the M integral requires c = 2a.  Violations throw
/// PreconditionError naming the parameter relation.
MBConservedSet mb_conserved(const SecondOrderSystem& system, const State& s, MBRegime regime);

/// Per-sample drift of one of the integrals 'E', 'B', 'M', 'N', with
/// amplification-aware per-sample scales (sum of term magnitudes).
DriftReport mb_integral_drift(const Trajectory& traj, const SecondOrderSystem& system,
                              char which);

/// max |l(t) - l(t0) e^{-(a+b)(t-t0)}| / (1 + |l(t0)|) for the planar angular
/// momentum l = q1 v2 - q2 v1: the well-conditioned multiplicative form of
/// "e^{(a+b)t} l(t) is constant".
double mb_decay_law_residual(const Trajectory& traj, double a, double b);

enum class OrbitKind { Periodic, Homoclinic, Unbounded, Equilibrium, NoEquilibria };

std::string to_string(OrbitKind k);

struct FishClassification {
    bool has_equilibria = false;
    double z_center = 0.0;  // smaller root: minimum of the potential well
    double z_saddle = 0.0;  // larger root: the separatrix passes through it
    OrbitKind kind = OrbitKind::NoEquilibria;
    double h_value = 0.0;       // fish energy of the queried point
    double h_separatrix = 0.0;  // fish energy of the saddle
};

/// Conserved energy of z'' + 2Bg^2 z + 2E - 3g^2 z^2 = 0:
/// H = zdot^2/2 + B g^2 z^2 + 2 E z - g^2 z^3.
double fish_energy(double E, double B, double g, double z, double zdot);

/// Equilibria of the z-equation (roots of 3g^2 z^2 - 2Bg^2 z - 2E) and the
/// phase-plane classification of the orbit through (z, zdot).
FishClassification fish_classify(double E, double B, double g, double z, double zdot,
                                 double rel_tol = 1e-9);

/// max over interior samples of |z'' + 2Bg^2 z + 2E - 3g^2 z^2| with z = v3,
/// z' = (exact model acceleration)_3, and z'' obtained by central finite
/// differences of z' on a uniform sample grid.  E, B taken at the base time.
double fish_residual(const Trajectory& traj, const SecondOrderSystem& system);

/// Drift of the fish energy along a conservative trajectory (z' exact).
DriftReport fish_energy_drift(const Trajectory& traj, const SecondOrderSystem& system);

struct PolarResiduals {
    double max_radial = 0.0;  // radial second-order equation, relative per sample
    double max_q3dot = 0.0;   // v3 = k - r^2/2 + M e^{-2at}/2, relative per sample
    double min_r = 0.0;
};

/// Residuals of the polar-coordinate reduction of the c = 2a system, using
/// the constants M and N evaluated at the base time.  Throws
/// PreconditionError if r drops below 1e-8 (the polar chart breaks down).
PolarResiduals mb_polar_reduction(const Trajectory& traj, const SecondOrderSystem& system,
                                  double M, double N);

struct AsymptoticsReport {
    double r_inf = 0.0;    // sqrt(2(g^2 k - ab))/g when positive, else 0
    double r_final = 0.0;  // r at the last sample
    double t_final = 0.0;
    double gap = 0.0;  // |r_final - r_inf|
};

/// Observational probe of the long-time radius of dissipative runs.
AsymptoticsReport mb_asymptotics(const Trajectory& traj, const SecondOrderSystem& system);

}  // namespace nlcm
