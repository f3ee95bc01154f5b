#include "nlcm/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "nlcm/errors.hpp"

namespace nlcm {

namespace {

void require_samples(const Trajectory& traj, const char* what) {
    if (traj.samples.empty())
        throw ContractViolation(std::string(what) + ": trajectory has no samples");
}

struct DriftAccum {
    double c0 = 0.0;
    DriftReport rep;
    void base(double v) {
        c0 = v;
        rep.value_t0 = v;
    }
    void add(double v, double scale) {
        const double d = std::abs(v - c0);
        rep.max_abs = std::max(rep.max_abs, d);
        rep.max_rel = std::max(rep.max_rel, d / scale);
        rep.scale_max = std::max(rep.scale_max, scale);
    }
};

}  // namespace

DriftReport constant_drift(const Trajectory& traj, std::size_t idx) {
    require_samples(traj, "constant_drift");
    if (idx >= traj.front().constants.size())
        throw ContractViolation("constant_drift: no attached constant with index " +
                                std::to_string(idx));
    DriftAccum acc;
    acc.base(traj.front().constants[idx]);
    for (const Sample& s : traj.samples) {
        const double value = s.constants[idx];
        const double integral = s.state.acc_integrals[idx];
        const double boundary = value + integral;
        const double scale = 1.0 + std::abs(acc.c0) + std::abs(boundary) + std::abs(integral);
        acc.add(value, scale);
    }
    return acc.rep;
}

DriftReport series_drift(const Trajectory& traj,
                         const std::function<double(const Sample&)>& c) {
    require_samples(traj, "series_drift");
    DriftAccum acc;
    acc.base(c(traj.front()));
    const double scale = 1.0 + std::abs(acc.c0);
    for (const Sample& s : traj.samples) acc.add(c(s), scale);
    return acc.rep;
}

double max_abs_integrand(const Trajectory& traj, const NonlocalConstant& nc) {
    require_samples(traj, "max_abs_integrand");
    double worst = 0.0;
    for (const Sample& s : traj.samples)
        worst = std::max(worst, std::abs(nc.integrand(s.state)));
    return worst;
}

DriftReport energy_shift_drift(const Trajectory& traj, const SecondOrderSystem& system,
                               std::size_t tshift_idx) {
    require_samples(traj, "energy_shift_drift");
    auto diff = [&](const Sample& s) {
        const State& st = s.state;
        const double energy = dot(system.dL_dv(st.t, st.q, st.v), st.v) -
                              system.lagrangian(st.t, st.q, st.v);
        return s.constants[tshift_idx] - energy;
    };
    return series_drift(traj, diff);
}

Hom2Integrals hom2_integrals(const SecondOrderSystem& system, const State& s) {
    if (!system.potential)
        throw ContractViolation("hom2_integrals needs a model exposing its potential");
    const double m = system.param("m");
    Hom2Integrals h;
    h.E = 0.5 * m * norm2(s.v) + system.potential(s.q);
    h.K = m * dot(s.v, s.q) - 2.0 * s.t * h.E;
    h.K1 = 0.5 * m * norm2(s.q) - s.t * s.t * h.E - s.t * h.K;
    return h;
}

double radial_law_residual(const Trajectory& traj, const Hom2Integrals& integrals, double m) {
    require_samples(traj, "radial_law_residual");
    double worst = 0.0;
    for (const Sample& s : traj.samples) {
        const double t = s.state.t;
        const double rhs =
            (2.0 / m) * (t * t * integrals.E + t * integrals.K + integrals.K1);
        worst = std::max(worst, std::abs(norm2(s.state.q) - rhs));
    }
    return worst;
}

ViscousBoundReport viscous_bound_check(const Trajectory& traj, double k, double m,
                                       const std::function<double(const Vec&)>& U,
                                       double tol_factor) {
    require_samples(traj, "viscous_bound_check");
    // Work in increasing time regardless of integration direction.
    std::vector<const Sample*> ordered;
    ordered.reserve(traj.samples.size());
    for (const Sample& s : traj.samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const Sample* a, const Sample* b) { return a->state.t < b->state.t; });

    auto phi = [&](const Sample& s) {
        return std::exp(2.0 * k * s.state.t / m) * (m * norm2(s.state.v) + 2.0 * U(s.state.q));
    };
    ViscousBoundReport rep;
    for (const Sample* s : ordered) rep.scale = std::max(rep.scale, std::abs(phi(*s)));
    const double tol = tol_factor * rep.scale;

    double prev = phi(*ordered.front());
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        const double cur = phi(*ordered[i]);
        if (cur < prev - tol) {
            if (rep.monotone_ok) rep.first_violation_t = ordered[i]->state.t;
            rep.monotone_ok = false;
            rep.max_decrease = std::max(rep.max_decrease, prev - cur);
        }
        prev = std::max(prev, cur);
    }

    // Past bound: for t <= t0, the kinetic part alone stays below the
    // monotone quantity's value at the base time.
    const Sample& base = traj.front();
    const double bound = phi(base);
    for (const Sample& s : traj.samples) {
        if (s.state.t > base.state.t) continue;
        const double kin = m * std::exp(2.0 * k * s.state.t / m) * norm2(s.state.v);
        if (kin > bound + tol) {
            rep.past_bound_ok = false;
            rep.max_bound_excess = std::max(rep.max_bound_excess, kin - bound);
        }
    }
    return rep;
}

QuadratureFn hydraulic_invariant_quadrature(double a, double m, double k,
                                            std::function<double(const Vec&)> U) {
    return [a, m, k, U](double t, const Vec& q, const Vec& v) {
        const double v2 = norm2(v);
        const double speed = std::sqrt(v2);
        return 0.5 * std::exp(-a * t) * (2.0 * k * speed * v2 + a * m * v2 + 2.0 * a * U(q));
    };
}

DriftReport hydraulic_invariant_drift(const Trajectory& traj, std::size_t extra_idx, double a,
                                      double m, const std::function<double(const Vec&)>& U) {
    require_samples(traj, "hydraulic_invariant_drift");
    if (extra_idx >= traj.front().extras.size())
        throw ContractViolation("hydraulic_invariant_drift: extra quadrature " +
                                std::to_string(extra_idx) + " was not attached");
    const Sample& base = traj.front();
    const double u0_term = std::exp(-a * base.state.t) * U(base.state.q);
    const double rhs = 0.5 * m * std::exp(-a * base.state.t) * norm2(base.state.v);
    DriftAccum acc;
    acc.base(rhs);
    for (const Sample& s : traj.samples) {
        const double w = std::exp(-a * s.state.t);
        const double kin = 0.5 * m * w * norm2(s.state.v);
        const double pot = w * U(s.state.q);
        const double quad = s.extras[extra_idx];
        const double lhs = kin + pot - u0_term + quad;
        const double scale =
            1.0 + std::abs(kin) + std::abs(pot) + std::abs(u0_term) + std::abs(quad);
        acc.add(lhs, scale);
    }
    return acc.rep;
}

namespace {

// strict: the comparison solution must actually blow up (explosion-time
// machinery).  Non-strict admits the stationary solution at the equilibrium
// of the separable equation.
void require_comparison_condition(double z0, double a, double k, double u_sup, bool strict) {
    const double margin = k * std::pow(z0, 1.5) - a * u_sup;
    const bool ok = z0 > 0.0 && (strict ? margin > 0.0 : margin >= 0.0);
    if (!ok)
        throw PreconditionError(
            "comparison solution does not blow up: need initial squared speed above "
            "2*U_sup/m + (a*U_sup/k)^(2/3)");
}

}  // namespace

Vec comparison_z_at(std::span<const double> times, double t0, double z0, double a, double m,
                    double k, double u_sup, const IntegratorConfig& cfg_in) {
    require_comparison_condition(z0, a, k, u_sup, false);
    IntegratorConfig cfg = cfg_in;
    cfg.mode = StepMode::Adaptive;
    cfg.blowup_threshold = std::numeric_limits<double>::infinity();
    OdeFn f = [&](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = -(2.0 / m) * (k * std::pow(std::abs(y[0]), 1.5) - a * u_sup);
    };
    std::vector<Vec> vals = solve_at_times(f, t0, Vec{z0}, times, cfg);
    Vec out(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i][0];
    return out;
}

double comparison_z(double t, double t0, double z0, double a, double m, double k, double u_sup,
                    const IntegratorConfig& cfg) {
    if (t == t0) return z0;
    const double times[] = {t};
    return comparison_z_at(times, t0, z0, a, m, k, u_sup, cfg)[0];
}

namespace {

// Adaptive Simpson with absolute tolerance, classic halving recursion.
double simpson_rec(const std::function<double(double)>& f, double lo, double hi, double flo,
                   double fmid, double fhi, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double fl = f(lmid), fr = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, lo, mid, flo, fl, fmid, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double rel_tol) {
    const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
    return simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol, 48);
}

}  // namespace

double explosion_time_offset(double z0, double a, double m, double k, double u_sup) {
    require_comparison_condition(z0, a, k, u_sup, true);
    // Substituting u = w^-2 maps [z0, inf) to (0, z0^-1/2] and turns the
    // integrand du / (k u^{3/2} - a U_sup) into 2 dw / (k - a U_sup w^3),
    // which is bounded on the whole interval under the blow-up condition.
    const double w0 = 1.0 / std::sqrt(z0);
    auto f = [k, a, u_sup](double w) { return 2.0 / (k - a * u_sup * w * w * w); };
    const double integral = adaptive_simpson(f, 0.0, w0, 1e-9);
    return -0.5 * m * integral;
}

BlowupReport blowup_experiment(const SecondOrderSystem& hydraulic, const State& s0, double a,
                               const IntegratorConfig& cfg, Trajectory* out_traj, Vec* out_z,
                               double t_end) {
    const double m = hydraulic.param("m");
    const double k = hydraulic.param("k_drag");
    const double u_sup = hydraulic.param("u_sup");
    if (!std::isnan(t_end) && t_end >= s0.t)
        throw ContractViolation("blow-up experiments integrate backward: t_end must be < t0");
    const double v2 = norm2(s0.v);
    if (!(0.5 * m * v2 > u_sup))
        throw PreconditionError(
            "backward blow-up needs initial kinetic energy strictly above the potential bound");
    const double z0 = v2 - 2.0 * u_sup / m;
    require_comparison_condition(z0, a, k, u_sup, true);

    BlowupReport rep;
    rep.z0 = z0;
    rep.condition_satisfied = true;
    rep.t_star = s0.t + explosion_time_offset(z0, a, m, k, u_sup);
    const double target = std::isnan(t_end) ? rep.t_star : t_end;

    Trajectory traj = integrate(hydraulic, {}, s0, target, cfg);
    rep.status = traj.status;
    rep.conclusive = traj.status == RunStatus::BlewUp;
    rep.t_detect = traj.t_stop;
    if (out_z) {
        Vec times(traj.samples.size());
        for (std::size_t i = 0; i < times.size(); ++i) times[i] = traj.samples[i].state.t;
        IntegratorConfig zcfg = cfg;
        zcfg.sample_dt = 0.0;
        *out_z = comparison_z_at(times, s0.t, z0, a, m, k, u_sup, zcfg);
    }
    if (out_traj) *out_traj = std::move(traj);
    return rep;
}

namespace {

void require_mb(const SecondOrderSystem& system, const char* what) {
    if (system.dim != 3 || !system.params.count("g"))
        throw ContractViolation(std::string(what) + " needs a Maxwell-Bloch model");
}

}  // namespace

MBConservedSet mb_conserved(const SecondOrderSystem& system, const State& s, MBRegime regime) {
    require_mb(system, "mb_conserved");
    const double a = system.param("a"), b = system.param("b"), c = system.param("c");
    const double g = system.param("g"), k = system.param("k_pump");
    if (regime == MBRegime::Conservative && (a != 0.0 || b != 0.0 || c != 0.0))
        throw PreconditionError("conservative integrals need a = b = c = 0");
    if (regime == MBRegime::DissipativeM && c != 2.0 * a)
        throw PreconditionError("the exponential inversion integral needs c = 2a");
    const double g2 = g * g;
    const double r2 = s.q[0] * s.q[0] + s.q[1] * s.q[1];
    MBConservedSet set;
    set.E_mb = 0.5 * (s.v[0] * s.v[0] + s.v[1] * s.v[1] + g2 * s.v[2] * s.v[2]);
    set.B = s.v[2] + 0.5 * r2;
    set.M_int = std::exp(2.0 * a * s.t) * (r2 + 2.0 * s.v[2] - 2.0 * k);
    set.N_int = std::exp((a + b) * s.t) * (s.q[0] * s.v[1] - s.q[1] * s.v[0]);
    return set;
}

DriftReport mb_integral_drift(const Trajectory& traj, const SecondOrderSystem& system,
                              char which) {
    require_samples(traj, "mb_integral_drift");
    require_mb(system, "mb_integral_drift");
    const double a = system.param("a"), b = system.param("b");
    const double g = system.param("g"), k = system.param("k_pump");
    const double g2 = g * g;
    DriftAccum acc;
    bool first = true;
    for (const Sample& smp : traj.samples) {
        const State& s = smp.state;
        const double r2 = s.q[0] * s.q[0] + s.q[1] * s.q[1];
        double value = 0.0, scale = 1.0;
        switch (which) {
            case 'E':
                value = 0.5 * (s.v[0] * s.v[0] + s.v[1] * s.v[1] + g2 * s.v[2] * s.v[2]);
                scale = 1.0 + std::abs(value);
                break;
            case 'B':
                value = s.v[2] + 0.5 * r2;
                scale = 1.0 + std::abs(s.v[2]) + 0.5 * r2;
                break;
            case 'M': {
                const double w = std::exp(2.0 * a * s.t);
                value = w * (r2 + 2.0 * s.v[2] - 2.0 * k);
                scale = 1.0 + w * (r2 + 2.0 * std::abs(s.v[2]) + 2.0 * std::abs(k));
                break;
            }
            case 'N': {
                const double w = std::exp((a + b) * s.t);
                value = w * (s.q[0] * s.v[1] - s.q[1] * s.v[0]);
                scale = 1.0 + w * (std::abs(s.q[0] * s.v[1]) + std::abs(s.q[1] * s.v[0]));
                break;
            }
            default:
                throw ContractViolation("mb_integral_drift: unknown integral tag");
        }
        if (first) {
            acc.base(value);
            first = false;
        }
        acc.add(value, scale);
    }
    return acc.rep;
}

double mb_decay_law_residual(const Trajectory& traj, double a, double b) {
    require_samples(traj, "mb_decay_law_residual");
    const Sample& base = traj.front();
    const double l0 = base.state.q[0] * base.state.v[1] - base.state.q[1] * base.state.v[0];
    double worst = 0.0;
    for (const Sample& smp : traj.samples) {
        const State& s = smp.state;
        const double l = s.q[0] * s.v[1] - s.q[1] * s.v[0];
        const double expected = l0 * std::exp(-(a + b) * (s.t - base.state.t));
        worst = std::max(worst, std::abs(l - expected));
    }
    return worst / (1.0 + std::abs(l0));
}

std::string to_string(OrbitKind kind) {
    switch (kind) {
        case OrbitKind::Periodic: return "periodic";
        case OrbitKind::Homoclinic: return "homoclinic";
        case OrbitKind::Unbounded: return "unbounded";
        case OrbitKind::Equilibrium: return "equilibrium";
        case OrbitKind::NoEquilibria: return "no-equilibria";
    }
    return "unknown";
}

double fish_energy(double E, double B, double g, double z, double zdot) {
    const double g2 = g * g;
    return 0.5 * zdot * zdot + B * g2 * z * z + 2.0 * E * z - g2 * z * z * z;
}

FishClassification fish_classify(double E, double B, double g, double z, double zdot,
                                 double rel_tol) {
    FishClassification cls;
    const double g2 = g * g;
    // Roots of 3 g^2 z^2 - 2 B g^2 z - 2 E, written to avoid cancellation.
    const double disc = B * B + 6.0 * E / g2;
    cls.h_value = fish_energy(E, B, g, z, zdot);
    if (disc < 0.0) {
        cls.kind = OrbitKind::NoEquilibria;
        return cls;
    }
    cls.has_equilibria = true;
    const double sq = std::sqrt(disc);
    cls.z_center = (B - sq) / 3.0;
    cls.z_saddle = (B + sq) / 3.0;
    cls.h_separatrix = fish_energy(E, B, g, cls.z_saddle, 0.0);

    const double zscale = 1.0 + std::abs(cls.z_center) + std::abs(cls.z_saddle);
    const double hscale = 1.0 + std::abs(cls.h_separatrix) + std::abs(cls.h_value);
    const bool at_center =
        std::abs(z - cls.z_center) <= rel_tol * zscale && std::abs(zdot) <= rel_tol * zscale;
    const bool at_saddle =
        std::abs(z - cls.z_saddle) <= rel_tol * zscale && std::abs(zdot) <= rel_tol * zscale;
    if (at_center || at_saddle) {
        cls.kind = OrbitKind::Equilibrium;
        return cls;
    }
    if (std::abs(cls.h_value - cls.h_separatrix) <= rel_tol * hscale) {
        // On the separatrix level set: the loop side (z <= saddle) is the
        // homoclinic orbit, the far side escapes.
        cls.kind = (z <= cls.z_saddle + rel_tol * zscale) ? OrbitKind::Homoclinic
                                                          : OrbitKind::Unbounded;
        return cls;
    }
    cls.kind = (cls.h_value < cls.h_separatrix && z < cls.z_saddle) ? OrbitKind::Periodic
                                                                    : OrbitKind::Unbounded;
    return cls;
}

double fish_residual(const Trajectory& traj, const SecondOrderSystem& system) {
    require_mb(system, "fish_residual");
    if (traj.samples.size() < 3)
        throw ContractViolation("fish_residual needs at least three samples");
    const double g = system.param("g");
    const double g2 = g * g;
    const Sample& base = traj.front();
    const MBConservedSet set = mb_conserved(system, base.state, MBRegime::Conservative);

    // The finite difference needs a uniform grid (integrate with sample_dt).
    const double dt = traj.samples[1].state.t - traj.samples[0].state.t;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double step = traj.samples[i].state.t - traj.samples[i - 1].state.t;
        if (std::abs(step - dt) > 1e-9 * std::abs(dt))
            throw ContractViolation("fish_residual needs uniformly sampled trajectories");
    }

    std::vector<double> zdot(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const State& s = traj.samples[i].state;
        zdot[i] = system.acceleration(s.t, s.q, s.v)[2];
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        const double z = traj.samples[i].state.v[2];
        const double zdd = (zdot[i + 1] - zdot[i - 1]) / (2.0 * dt);
        worst = std::max(worst,
                         std::abs(zdd + 2.0 * set.B * g2 * z + 2.0 * set.E_mb - 3.0 * g2 * z * z));
    }
    return worst;
}

DriftReport fish_energy_drift(const Trajectory& traj, const SecondOrderSystem& system) {
    require_mb(system, "fish_energy_drift");
    require_samples(traj, "fish_energy_drift");
    const double g = system.param("g");
    const MBConservedSet set = mb_conserved(system, traj.front().state, MBRegime::Conservative);
    return series_drift(traj, [&](const Sample& smp) {
        const State& s = smp.state;
        const double zdot = system.acceleration(s.t, s.q, s.v)[2];
        return fish_energy(set.E_mb, set.B, g, s.v[2], zdot);
    });
}

PolarResiduals mb_polar_reduction(const Trajectory& traj, const SecondOrderSystem& system,
                                  double M, double N) {
    require_mb(system, "mb_polar_reduction");
    require_samples(traj, "mb_polar_reduction");
    const double a = system.param("a"), b = system.param("b");
    const double g = system.param("g"), k = system.param("k_pump");
    const double g2 = g * g;
    PolarResiduals res;
    res.min_r = std::numeric_limits<double>::infinity();
    for (const Sample& smp : traj.samples) {
        const State& s = smp.state;
        const double r2 = s.q[0] * s.q[0] + s.q[1] * s.q[1];
        const double r = std::sqrt(r2);
        res.min_r = std::min(res.min_r, r);
        if (r < 1e-8)
            throw PreconditionError("polar reduction undefined: r fell below 1e-8");
        const Vec acc = system.acceleration(s.t, s.q, s.v);
        const double rdot = (s.q[0] * s.v[0] + s.q[1] * s.v[1]) / r;
        const double rdd = (s.q[0] * acc[0] + s.q[1] * acc[1] + s.v[0] * s.v[0] +
                            s.v[1] * s.v[1] - rdot * rdot) /
                           r;
        const double term_damp = -(a + b) * rdot;
        const double term_lin = (g2 * k - a * b + 0.5 * g2 * M * std::exp(-2.0 * a * s.t)) * r;
        const double term_cub = -0.5 * g2 * r2 * r;
        const double term_ang = (N * N / (r2 * r)) * std::exp(-2.0 * (a + b) * s.t);
        const double rhs = term_damp + term_lin + term_cub + term_ang;
        const double scale_r = 1.0 + std::abs(rdd) + std::abs(term_damp) + std::abs(term_lin) +
                               std::abs(term_cub) + std::abs(term_ang);
        res.max_radial = std::max(res.max_radial, std::abs(rdd - rhs) / scale_r);

        const double v3_pred = k - 0.5 * r2 + 0.5 * M * std::exp(-2.0 * a * s.t);
        const double scale_q3 = 1.0 + std::abs(k) + 0.5 * r2 +
                                0.5 * std::abs(M) * std::exp(-2.0 * a * s.t) +
                                std::abs(s.v[2]);
        res.max_q3dot = std::max(res.max_q3dot, std::abs(s.v[2] - v3_pred) / scale_q3);
    }
    return res;
}

AsymptoticsReport mb_asymptotics(const Trajectory& traj, const SecondOrderSystem& system) {
    require_mb(system, "mb_asymptotics");
    require_samples(traj, "mb_asymptotics");
    const double a = system.param("a"), b = system.param("b");
    const double g = system.param("g"), k = system.param("k_pump");
    AsymptoticsReport rep;
    const double excess = g * g * k - a * b;
    rep.r_inf = excess > 0.0 ? std::sqrt(2.0 * excess) / g : 0.0;
    const State& last = traj.back().state;
    rep.r_final = std::sqrt(last.q[0] * last.q[0] + last.q[1] * last.q[1]);
    rep.t_final = last.t;
    rep.gap = std::abs(rep.r_final - rep.r_inf);
    return rep;
}

}  // namespace nlcm
