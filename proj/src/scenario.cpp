#include "nlcm/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nlcm/analysis.hpp"
#include "nlcm/errors.hpp"
#include "nlcm/families.hpp"
#include "nlcm/models.hpp"

namespace nlcm {

namespace detail {
const std::vector<const char*>& bundled_scenario_texts();
}

namespace {

using nlohmann::json;

// Shortest decimal representation that round-trips the double.
std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double finite_or_max(double x) {
    if (std::isfinite(x)) return x;
    return std::numeric_limits<double>::max();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out.flush()) throw Error("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------- parsing --

struct Entry {
    std::string key;
    std::vector<std::string> tokens;
    int line = 0;
    int col = 1;
    mutable bool used = false;
};

std::vector<Entry> parse_entries(const std::string& text) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", lineno, static_cast<int>(first) + 1);
        Entry e;
        e.line = lineno;
        e.col = static_cast<int>(first) + 1;
        e.key = line.substr(0, eq);
        e.key.erase(0, e.key.find_first_not_of(" \t"));
        e.key.erase(e.key.find_last_not_of(" \t") + 1);
        if (e.key.empty()) throw ParseError("missing key before '='", lineno, 1);
        std::istringstream vals(line.substr(eq + 1));
        std::string tok;
        while (vals >> tok) e.tokens.push_back(tok);
        if (e.tokens.empty())
            throw ParseError("key '" + e.key + "' has no value", lineno,
                             static_cast<int>(eq) + 2);
        entries.push_back(std::move(e));
    }
    return entries;
}

double parse_number(const std::string& tok, int line) {
    double out = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError("expected a number, got '" + tok + "'", line);
    return out;
}

struct ScenarioSpec {
    std::string id;
    std::string model_id;
    std::map<std::string, double> overrides;
    std::vector<std::string> family_ids;
    double t0 = 0.0;
    Vec q, v;
    double t_end = std::numeric_limits<double>::quiet_NaN();
    IntegratorConfig icfg;
    double blowup_a = std::numeric_limits<double>::quiet_NaN();
    std::string expect_status;
    std::string out_format = "csv";
    std::string out_path;

    std::optional<double> a_drift_rel, a_energy_shift, a_radial, a_viscous, a_hydraulic,
        a_comparison, a_mbE, a_mbB, a_mbM, a_mbN, a_decay, a_angmom, a_fish_res, a_fish_energy,
        a_polar, p_rinf;
    std::vector<std::pair<std::string, double>> a_integrand;
    std::optional<std::pair<double, double>> a_tdetect;

    bool blowup_mode() const { return !std::isnan(blowup_a); }
};

const Entry* find_one(const std::vector<Entry>& entries, const std::string& key,
                      bool required = false) {
    const Entry* found = nullptr;
    for (const Entry& e : entries) {
        if (e.key != key) continue;
        if (found) throw ParseError("duplicate key '" + key + "'", e.line);
        found = &e;
        e.used = true;
    }
    if (required && !found) throw ParseError("missing required key '" + key + "'", 0);
    return found;
}

std::optional<double> opt_number(const std::vector<Entry>& entries, const std::string& key) {
    const Entry* e = find_one(entries, key);
    if (!e) return std::nullopt;
    if (e->tokens.size() != 1)
        throw ParseError("key '" + key + "' takes a single number", e->line);
    return parse_number(e->tokens[0], e->line);
}

ScenarioSpec build_spec(const std::vector<Entry>& entries) {
    ScenarioSpec spec;

    const Entry* id = find_one(entries, "id", true);
    if (id->tokens.size() != 1) throw ParseError("id must be a single token", id->line);
    spec.id = id->tokens[0];

    const Entry* model = find_one(entries, "model.id", true);
    if (model->tokens.size() != 1)
        throw ParseError("model.id must be a single token", model->line);
    spec.model_id = model->tokens[0];

    for (const Entry& e : entries) {
        if (e.key.rfind("model.", 0) == 0 && e.key != "model.id") {
            if (e.tokens.size() != 1)
                throw ParseError("model parameter '" + e.key + "' takes a single number",
                                 e.line);
            spec.overrides[e.key.substr(6)] = parse_number(e.tokens[0], e.line);
            e.used = true;
        } else if (e.key == "family") {
            if (e.tokens.size() != 1)
                throw ParseError("each 'family' line names one family id", e.line);
            spec.family_ids.push_back(e.tokens[0]);
            e.used = true;
        }
    }

    if (auto t0 = opt_number(entries, "initial.t0")) spec.t0 = *t0;
    const Entry* q = find_one(entries, "initial.q", true);
    for (const std::string& t : q->tokens) spec.q.push_back(parse_number(t, q->line));
    const Entry* v = find_one(entries, "initial.v", true);
    for (const std::string& t : v->tokens) spec.v.push_back(parse_number(t, v->line));
    if (spec.q.size() != spec.v.size())
        throw ParseError("initial.q and initial.v must have the same length", v->line);

    if (auto te = opt_number(entries, "horizon.t_end")) spec.t_end = *te;

    if (const Entry* mode = find_one(entries, "integrator.mode")) {
        if (mode->tokens[0] == "fixed")
            spec.icfg.mode = StepMode::Fixed;
        else if (mode->tokens[0] == "adaptive")
            spec.icfg.mode = StepMode::Adaptive;
        else
            throw ParseError("integrator.mode is 'fixed' or 'adaptive'", mode->line);
    }
    if (auto x = opt_number(entries, "integrator.h")) spec.icfg.h = *x;
    if (auto x = opt_number(entries, "integrator.rtol")) spec.icfg.rtol = *x;
    if (auto x = opt_number(entries, "integrator.atol")) spec.icfg.atol = *x;
    if (auto x = opt_number(entries, "integrator.h_min")) spec.icfg.h_min = *x;
    if (auto x = opt_number(entries, "integrator.h_max")) spec.icfg.h_max = *x;
    if (auto x = opt_number(entries, "integrator.sample_dt")) spec.icfg.sample_dt = *x;
    if (auto x = opt_number(entries, "integrator.max_steps"))
        spec.icfg.max_steps = static_cast<long>(*x);
    if (auto x = opt_number(entries, "integrator.blowup_threshold"))
        spec.icfg.blowup_threshold = *x;

    if (auto x = opt_number(entries, "blowup.a")) spec.blowup_a = *x;

    if (const Entry* e = find_one(entries, "expect.status")) {
        if (e->tokens[0] != "completed" && e->tokens[0] != "blew_up")
            throw ParseError("expect.status is 'completed' or 'blew_up'", e->line);
        spec.expect_status = e->tokens[0];
    } else {
        spec.expect_status = spec.blowup_mode() ? "blew_up" : "completed";
    }

    if (const Entry* e = find_one(entries, "output.format")) {
        if (e->tokens[0] != "csv" && e->tokens[0] != "json" && e->tokens[0] != "none")
            throw ParseError("output.format is 'csv', 'json' or 'none'", e->line);
        spec.out_format = e->tokens[0];
    }
    if (const Entry* e = find_one(entries, "output.path")) spec.out_path = e->tokens[0];
    if (spec.out_path.empty()) spec.out_path = spec.id;

    spec.a_drift_rel = opt_number(entries, "assert.drift_rel");
    spec.a_energy_shift = opt_number(entries, "assert.energy_shift_drift");
    spec.a_radial = opt_number(entries, "assert.radial_law");
    spec.a_viscous = opt_number(entries, "assert.viscous_monotone");
    spec.a_hydraulic = opt_number(entries, "assert.hydraulic_invariant");
    spec.a_comparison = opt_number(entries, "assert.comparison_bound");
    spec.a_mbE = opt_number(entries, "assert.mb_drift_E");
    spec.a_mbB = opt_number(entries, "assert.mb_drift_B");
    spec.a_mbM = opt_number(entries, "assert.mb_drift_M");
    spec.a_mbN = opt_number(entries, "assert.mb_drift_N");
    spec.a_decay = opt_number(entries, "assert.mb_decay_law");
    spec.a_angmom = opt_number(entries, "assert.angmom_drift");
    spec.a_fish_res = opt_number(entries, "assert.fish_residual");
    spec.a_fish_energy = opt_number(entries, "assert.fish_energy_drift");
    spec.a_polar = opt_number(entries, "assert.polar_residual");
    spec.p_rinf = opt_number(entries, "probe.r_inf");

    for (const Entry& e : entries) {
        if (e.key == "assert.integrand_abs") {
            if (e.tokens.size() != 2)
                throw ParseError("assert.integrand_abs takes '<family id> <tolerance>'",
                                 e.line);
            spec.a_integrand.emplace_back(e.tokens[0], parse_number(e.tokens[1], e.line));
            e.used = true;
        } else if (e.key == "assert.t_detect") {
            if (e.tokens.size() != 2)
                throw ParseError("assert.t_detect takes '<expected time> <tolerance>'", e.line);
            spec.a_tdetect = {parse_number(e.tokens[0], e.line),
                              parse_number(e.tokens[1], e.line)};
            e.used = true;
        }
    }

    for (const Entry& e : entries)
        if (!e.used) throw ParseError("unknown key '" + e.key + "'", e.line);

    // Cross-key validation.
    const bool is_mb = spec.model_id == "mb-cons" || spec.model_id == "mb-diss";
    const bool is_hom2 = spec.model_id == "central2" || spec.model_id == "calogero";
    auto require_model = [&](bool ok, const char* what, bool present) {
        if (present && !ok)
            throw ParseError(std::string(what) + " does not apply to model '" + spec.model_id +
                                 "'",
                             0);
    };
    require_model(is_hom2, "assert.radial_law", spec.a_radial.has_value());
    require_model(spec.model_id == "viscous", "assert.viscous_monotone",
                  spec.a_viscous.has_value());
    require_model(spec.model_id == "hydraulic", "assert.hydraulic_invariant",
                  spec.a_hydraulic.has_value());
    require_model(spec.model_id == "hydraulic", "blowup.a", spec.blowup_mode());
    require_model(is_mb, "Maxwell-Bloch checks",
                  spec.a_mbE || spec.a_mbB || spec.a_mbM || spec.a_mbN || spec.a_decay ||
                      spec.a_angmom || spec.a_fish_res || spec.a_fish_energy || spec.a_polar ||
                      spec.p_rinf);
    require_model(spec.model_id == "mb-cons", "conservative Maxwell-Bloch checks",
                  spec.a_fish_res || spec.a_fish_energy || spec.a_angmom ||
                      spec.a_mbE.has_value() || spec.a_mbB.has_value());
    require_model(spec.model_id == "mb-diss", "dissipative Maxwell-Bloch checks",
                  spec.a_mbM.has_value() || spec.a_polar.has_value() || spec.p_rinf.has_value());

    if (spec.blowup_mode()) {
        if (!spec.family_ids.empty())
            throw ParseError("blow-up runs do not attach families", 0);
        if (spec.a_drift_rel)
            throw ParseError("assert.drift_rel needs attached families", 0);
    } else if (std::isnan(spec.t_end)) {
        throw ParseError("missing required key 'horizon.t_end'", 0);
    }
    if (spec.a_fish_res && !(spec.icfg.sample_dt > 0))
        throw ParseError("assert.fish_residual needs integrator.sample_dt > 0", 0);
    if (spec.a_energy_shift &&
        std::find(spec.family_ids.begin(), spec.family_ids.end(), "tshift") ==
            spec.family_ids.end())
        throw ParseError("assert.energy_shift_drift needs the tshift family attached", 0);
    for (const auto& [fam, tol] : spec.a_integrand) {
        (void)tol;
        if (std::find(spec.family_ids.begin(), spec.family_ids.end(), fam) ==
            spec.family_ids.end())
            throw ParseError("assert.integrand_abs references family '" + fam +
                                 "' which is not attached",
                             0);
    }
    return spec;
}

// ---------------------------------------------------------------- running --

struct ColumnSpec {
    std::string name;
    std::function<double(std::size_t, const Sample&)> get;
};

std::string csv_field(const std::string& name) {
    if (name.find_first_of(",\"") == std::string::npos) return name;
    std::string quoted = "\"";
    for (char ch : name) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

std::string render_csv(const Trajectory& traj, const std::vector<ColumnSpec>& cols) {
    std::string out;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += csv_field(cols[c].name);
    }
    out += '\n';
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            out += format_double(cols[c].get(i, s));
        }
        out += '\n';
    }
    return out;
}

json render_samples_json(const Trajectory& traj, const std::vector<ColumnSpec>& cols) {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        json row;
        for (const ColumnSpec& c : cols) row[c.name] = finite_or_max(c.get(i, s));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct CheckList {
    std::vector<CheckResult> checks;
    void add(const std::string& name, double value, double tol, bool observational = false) {
        CheckResult c;
        c.name = name;
        c.value = finite_or_max(value);
        c.tolerance = tol;
        c.passed = c.value <= tol;
        c.observational = observational;
        checks.push_back(std::move(c));
    }
    bool all_passed() const {
        for (const CheckResult& c : checks)
            if (!c.observational && !c.passed) return false;
        return true;
    }
};

ScenarioResult run_spec(const ScenarioSpec& spec, const std::filesystem::path& outdir) {
    const auto t_begin = std::chrono::steady_clock::now();

    SecondOrderSystem system;
    std::vector<NonlocalConstant> constants;
    std::vector<QuadratureFn> extras;
    double hshift_a = std::numeric_limits<double>::quiet_NaN();
    try {
        system = make_model_preset(spec.model_id, spec.q.size(), spec.overrides);
        for (const std::string& fid : spec.family_ids) {
            NonlocalConstant nc{system, make_family(fid, system), fid};
            constants.push_back(std::move(nc));
            if (fid.rfind("hshift:", 0) == 0) hshift_a = std::stod(fid.substr(7));
        }
        if (spec.a_hydraulic) {
            if (std::isnan(hshift_a))
                throw ContractViolation(
                    "assert.hydraulic_invariant needs an hshift:<a> family attached");
            extras.push_back(hydraulic_invariant_quadrature(
                hshift_a, system.param("m"), system.param("k_drag"), system.potential));
        }
    } catch (const ContractViolation& e) {
        throw ParseError(e.what(), 0);
    }

    CheckList cl;
    Trajectory traj;
    Vec zvals;
    std::optional<BlowupReport> blowup;
    const State s0 = make_state(spec.t0, spec.q, spec.v, constants.size());
    if (spec.blowup_mode()) {
        blowup = blowup_experiment(system, s0, spec.blowup_a, spec.icfg, &traj, &zvals);
    } else {
        traj = integrate(system, constants, s0, spec.t_end, spec.icfg, extras);
    }

    // --- checks -------------------------------------------------------------
    cl.add("status", to_string(traj.status) == spec.expect_status ? 0.0 : 1.0, 0.0);

    if (spec.a_drift_rel)
        for (std::size_t i = 0; i < constants.size(); ++i)
            cl.add("drift_rel:" + constants[i].label, constant_drift(traj, i).max_rel,
                   *spec.a_drift_rel);
    for (const auto& [fam, tol] : spec.a_integrand) {
        for (std::size_t i = 0; i < constants.size(); ++i)
            if (constants[i].label == fam)
                cl.add("integrand_abs:" + fam, max_abs_integrand(traj, constants[i]), tol);
    }
    if (spec.a_energy_shift) {
        const std::size_t idx = static_cast<std::size_t>(
            std::find(spec.family_ids.begin(), spec.family_ids.end(), "tshift") -
            spec.family_ids.begin());
        cl.add("energy_shift_drift", energy_shift_drift(traj, system, idx).max_rel,
               *spec.a_energy_shift);
    }

    std::optional<Hom2Integrals> hom2;
    if (spec.a_radial) {
        hom2 = hom2_integrals(system, traj.front().state);
        cl.add("radial_law", radial_law_residual(traj, *hom2, system.param("m")),
               *spec.a_radial);
    }
    if (spec.a_viscous) {
        const auto rep = viscous_bound_check(traj, system.param("k_drag"), system.param("m"),
                                             system.potential, *spec.a_viscous);
        cl.add("viscous_monotone",
               std::max(rep.max_decrease, rep.max_bound_excess) / rep.scale, *spec.a_viscous);
    }
    if (spec.a_hydraulic)
        cl.add("hydraulic_invariant",
               hydraulic_invariant_drift(traj, 0, hshift_a, system.param("m"),
                                         system.potential)
                   .max_rel,
               *spec.a_hydraulic);

    if (blowup) {
        cl.add("blowup_conclusive", blowup->conclusive ? 0.0 : 1.0, 0.0);
        cl.add("blowup_order", std::max(0.0, blowup->t_star - blowup->t_detect), 1e-6);
        if (spec.a_tdetect)
            cl.add("t_detect", std::abs(blowup->t_detect - spec.a_tdetect->first),
                   spec.a_tdetect->second);
        if (spec.a_comparison) {
            double worst = 0.0;
            for (std::size_t i = 0; i < traj.samples.size(); ++i) {
                const double v2 = norm2(traj.samples[i].state.v);
                worst = std::max(worst, (zvals[i] - v2) / (1.0 + std::abs(zvals[i])));
            }
            cl.add("comparison_bound", std::max(0.0, worst), *spec.a_comparison);
        }
    }

    std::optional<MBConservedSet> mbset;
    if (spec.model_id == "mb-cons" || spec.model_id == "mb-diss") {
        const MBRegime regime = spec.model_id == "mb-cons" ? MBRegime::Conservative
                                                           : MBRegime::DissipativeM;
        mbset = mb_conserved(system, traj.front().state, regime);
    }
    if (spec.a_mbE) cl.add("mb_drift_E", mb_integral_drift(traj, system, 'E').max_rel, *spec.a_mbE);
    if (spec.a_mbB) cl.add("mb_drift_B", mb_integral_drift(traj, system, 'B').max_rel, *spec.a_mbB);
    if (spec.a_mbM) cl.add("mb_drift_M", mb_integral_drift(traj, system, 'M').max_rel, *spec.a_mbM);
    if (spec.a_mbN) cl.add("mb_drift_N", mb_integral_drift(traj, system, 'N').max_rel, *spec.a_mbN);
    if (spec.a_decay)
        cl.add("mb_decay_law",
               mb_decay_law_residual(traj, system.param("a"), system.param("b")), *spec.a_decay);
    if (spec.a_angmom)
        cl.add("angmom_drift",
               series_drift(traj,
                            [](const Sample& s) {
                                return s.state.q[0] * s.state.v[1] -
                                       s.state.q[1] * s.state.v[0];
                            })
                   .max_rel,
               *spec.a_angmom);
    if (spec.a_fish_res)
        cl.add("fish_residual", fish_residual(traj, system), *spec.a_fish_res);
    if (spec.a_fish_energy)
        cl.add("fish_energy_drift", fish_energy_drift(traj, system).max_rel,
               *spec.a_fish_energy);
    if (spec.a_polar) {
        const auto res = mb_polar_reduction(traj, system, mbset->M_int, mbset->N_int);
        cl.add("polar_residual", std::max(res.max_radial, res.max_q3dot), *spec.a_polar);
    }
    std::optional<AsymptoticsReport> asym;
    if (spec.p_rinf) {
        asym = mb_asymptotics(traj, system);
        cl.add("probe_r_inf_gap", asym->gap, *spec.p_rinf, /*observational=*/true);
    }

    // --- output -------------------------------------------------------------
    const std::size_t n = system.dim;
    std::vector<ColumnSpec> cols;
    cols.push_back({"t", [](std::size_t, const Sample& s) { return s.state.t; }});
    for (std::size_t i = 0; i < n; ++i)
        cols.push_back(
            {"q" + std::to_string(i), [i](std::size_t, const Sample& s) { return s.state.q[i]; }});
    for (std::size_t i = 0; i < n; ++i)
        cols.push_back(
            {"v" + std::to_string(i), [i](std::size_t, const Sample& s) { return s.state.v[i]; }});
    for (std::size_t i = 0; i < constants.size(); ++i)
        cols.push_back({"c:" + constants[i].label,
                        [i](std::size_t, const Sample& s) { return s.constants[i]; }});
    for (std::size_t e = 0; e < extras.size(); ++e)
        cols.push_back({"x" + std::to_string(e),
                        [e](std::size_t, const Sample& s) { return s.extras[e]; }});
    if (hom2) {
        const Hom2Integrals h = *hom2;
        const double m = system.param("m");
        cols.push_back({"law_r2", [h, m](std::size_t, const Sample& s) {
                            const double t = s.state.t;
                            return (2.0 / m) * (t * t * h.E + t * h.K + h.K1);
                        }});
    }
    if (blowup) {
        cols.push_back(
            {"v2", [](std::size_t, const Sample& s) { return norm2(s.state.v); }});
        const Vec z = zvals;
        cols.push_back({"z_comparison", [z](std::size_t i, const Sample&) { return z[i]; }});
    }
    if (mbset) {
        cols.push_back({"r", [](std::size_t, const Sample& s) {
                            return std::hypot(s.state.q[0], s.state.q[1]);
                        }});
        const SecondOrderSystem sys = system;
        cols.push_back({"q3ddot", [sys](std::size_t, const Sample& s) {
                            return sys.acceleration(s.state.t, s.state.q, s.state.v)[2];
                        }});
    }

    ScenarioResult result;
    result.id = spec.id;
    result.checks = cl.checks;
    result.passed = cl.all_passed();
    result.exit_code = result.passed ? 0 : 1;

    std::filesystem::create_directories(outdir);
    json summary;
    summary["schema"] = "nlcm-summary/1";
    summary["id"] = spec.id;
    summary["model"] = spec.model_id;
    summary["dim"] = n;
    summary["families"] = spec.family_ids;
    summary["direction"] = traj.direction == Direction::Forward ? "forward" : "backward";
    summary["status"] = to_string(traj.status);
    summary["status_expected"] = spec.expect_status;
    summary["stop_reason"] = traj.stop_reason;
    summary["t0"] = spec.t0;
    summary["t_stop"] = traj.t_stop;
    summary["samples"] = traj.samples.size();
    summary["steps_accepted"] = traj.n_accepted;
    summary["steps_rejected"] = traj.n_rejected;
    json integ;
    integ["mode"] = spec.icfg.mode == StepMode::Adaptive ? "adaptive" : "fixed";
    integ["rtol"] = spec.icfg.rtol;
    integ["atol"] = spec.icfg.atol;
    integ["h"] = spec.icfg.h;
    integ["h_min"] = spec.icfg.h_min;
    integ["h_max"] = spec.icfg.h_max;
    integ["sample_dt"] = spec.icfg.sample_dt;
    integ["blowup_threshold"] = spec.icfg.blowup_threshold;
    integ["max_steps"] = spec.icfg.max_steps;
    summary["integrator"] = integ;

    json jconsts = json::array();
    for (std::size_t i = 0; i < constants.size(); ++i) {
        const DriftReport d = constant_drift(traj, i);
        json jc;
        jc["label"] = constants[i].label;
        jc["value_t0"] = finite_or_max(d.value_t0);
        jc["drift_abs"] = finite_or_max(d.max_abs);
        jc["drift_rel"] = finite_or_max(d.max_rel);
        jconsts.push_back(std::move(jc));
    }
    summary["constants"] = jconsts;
    if (hom2) {
        summary["hom2"] = {{"E", hom2->E}, {"K", hom2->K}, {"K1", hom2->K1}};
    }
    if (blowup) {
        summary["blowup"] = {{"t_star", blowup->t_star},
                             {"t_detect", blowup->t_detect},
                             {"z0", blowup->z0},
                             {"condition_satisfied", blowup->condition_satisfied},
                             {"conclusive", blowup->conclusive}};
    }
    if (mbset) {
        summary["mb"] = {{"E_mb", mbset->E_mb},
                         {"B", mbset->B},
                         {"M", finite_or_max(mbset->M_int)},
                         {"N", finite_or_max(mbset->N_int)}};
        if (asym) {
            summary["mb"]["r_inf"] = asym->r_inf;
            summary["mb"]["r_final"] = asym->r_final;
            summary["mb"]["t_final"] = asym->t_final;
        }
    }
    json jchecks = json::array();
    for (const CheckResult& c : result.checks) {
        jchecks.push_back({{"name", c.name},
                           {"value", c.value},
                           {"tolerance", c.tolerance},
                           {"passed", c.passed},
                           {"observational", c.observational}});
    }
    summary["checks"] = jchecks;
    summary["passed"] = result.passed;
    summary["exit_code"] = result.exit_code;

    if (spec.out_format != "none") {
        result.samples_path = outdir / (spec.out_path + (spec.out_format == "csv"
                                                             ? ".csv"
                                                             : ".samples.json"));
        if (spec.out_format == "csv")
            atomic_write(result.samples_path, render_csv(traj, cols));
        else
            atomic_write(result.samples_path, render_samples_json(traj, cols).dump(1));
        summary["files"]["samples"] = result.samples_path.filename().string();
    }
    result.summary_path = outdir / (spec.out_path + ".summary.json");
    summary["files"]["summary"] = result.summary_path.filename().string();

    const auto t_done = std::chrono::steady_clock::now();
    result.wall_time_s = std::chrono::duration<double>(t_done - t_begin).count();
    summary["wall_time_s"] = result.wall_time_s;

    result.summary_json = summary.dump(1);
    atomic_write(result.summary_path, result.summary_json);
    return result;
}

}  // namespace

ScenarioResult run_scenario_text(const std::string& text,
                                 const std::filesystem::path& outdir) {
    return run_spec(build_spec(parse_entries(text)), outdir);
}

ScenarioResult run_scenario_file(const std::filesystem::path& config_path,
                                 const std::filesystem::path& outdir) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw Error("cannot read config file '" + config_path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_scenario_text(buf.str(), outdir);
}

const std::vector<std::pair<std::string, std::string>>& bundled_scenarios() {
    static const std::vector<std::pair<std::string, std::string>> all = [] {
        std::vector<std::pair<std::string, std::string>> v;
        for (const char* text : detail::bundled_scenario_texts()) {
            const ScenarioSpec spec = build_spec(parse_entries(text));
            v.emplace_back(spec.id, text);
        }
        std::sort(v.begin(), v.end());
        return v;
    }();
    return all;
}

namespace {

void builtin_quality_checks(CheckList& cl) {
    // RK4 order on the harmonic oscillator against the cosine solution.
    {
        auto sys = make_harmonic_oscillator();
        const State s0 = make_state(0.0, {1.0}, {0.0});
        auto exact = [](double t) { return make_state(t, {std::cos(t)}, {-std::sin(t)}); };
        const double hs[] = {0.1, 0.05, 0.025};
        const OrderReport rep = order_check(sys, s0, 2.0, exact, hs);
        cl.add("rk4_order_harmonic", std::abs(rep.mean_order - 4.0), 0.3);
    }
    // Free particle: fixed steps reproduce the linear solution exactly.
    {
        auto sys = make_free_particle();
        const State s0 = make_state(0.0, {0.0}, {1.0});
        auto exact = [](double t) { return make_state(t, {t}, {1.0}); };
        const double hs[] = {0.1, 0.05};
        const OrderReport rep = order_check(sys, s0, 2.0, exact, hs);
        cl.add("rk4_exact_free_particle", rep.exact ? 0.0 : 1.0, 0.0);
    }
    // Circular orbit of the inverse-square model: |q| = 1, period 2 pi.
    {
        auto sys = make_central_inverse_square({});
        const State s0 = make_state(0.0, {1.0, 0.0}, {0.0, 1.0});
        auto exact = [](double t) {
            return make_state(t, {std::cos(t), std::sin(t)}, {-std::sin(t), std::cos(t)});
        };
        const double hs[] = {0.1, 0.05, 0.025};
        const OrderReport rep = order_check(sys, s0, 1.0, exact, hs);
        cl.add("rk4_order_central_circular", std::abs(rep.mean_order - 4.0), 0.3);
    }
    // Forward then backward returns the initial state at integrator accuracy.
    {
        auto sys = make_harmonic_oscillator(1.0, 1.0, 2);
        IntegratorConfig cfg;
        const State s0 = make_state(0.0, {1.0, 0.2}, {0.0, -0.3});
        Trajectory fwd = integrate(sys, {}, s0, 2.0 * 3.14159265358979323846, cfg);
        Trajectory bwd = integrate(sys, {}, fwd.back().state, 0.0, cfg);
        const State& r = bwd.back().state;
        double err = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            err = std::max(err, std::abs(r.q[i] - s0.q[i]));
            err = std::max(err, std::abs(r.v[i] - s0.v[i]));
        }
        cl.add("roundtrip_error", err, 10.0 * cfg.rtol);
    }
    // Quadrature of the comparison-solution explosion time against the
    // closed form -m/(k sqrt(z0)) available when the potential bound is 0.
    {
        double worst = 0.0;
        for (double z0 : {0.25, 1.0, 4.0})
            for (double m : {1.0, 2.0})
                for (double k : {1.0, 3.0}) {
                    const double got = explosion_time_offset(z0, 1e-3, m, k, 0.0);
                    const double want = -m / (k * std::sqrt(z0));
                    worst = std::max(worst, std::abs(got - want) / std::abs(want));
                }
        cl.add("explosion_time_closed_form", worst, 1e-8);
    }
    // Backward span of the comparison solution: longer for smaller z0 and
    // for larger potential bound.
    {
        const double z0s[] = {2.0, 4.0, 8.0};
        const double usups[] = {0.0, 0.5, 1.0};
        double violation = 0.0;
        for (double u : usups)
            for (std::size_t i = 0; i + 1 < 3; ++i) {
                const double d0 = -explosion_time_offset(z0s[i], 0.1, 1.0, 1.0, u);
                const double d1 = -explosion_time_offset(z0s[i + 1], 0.1, 1.0, 1.0, u);
                violation = std::max(violation, d1 - d0);
            }
        for (double z0 : z0s)
            for (std::size_t i = 0; i + 1 < 3; ++i) {
                const double d0 = -explosion_time_offset(z0, 0.1, 1.0, 1.0, usups[i]);
                const double d1 = -explosion_time_offset(z0, 0.1, 1.0, 1.0, usups[i + 1]);
                violation = std::max(violation, d0 - d1);
            }
        cl.add("explosion_time_monotone", violation, 1e-12);
    }
}

}  // namespace

CheckReport run_all_checks(const std::filesystem::path& outdir) {
    const auto t_begin = std::chrono::steady_clock::now();
    CheckReport rep;
    std::ostringstream out;
    bool all = true;
    for (const auto& [id, text] : bundled_scenarios()) {
        const ScenarioResult r = run_scenario_text(text, outdir);
        ++rep.n_total;
        if (r.exit_code == 0) ++rep.n_passed;
        all = all && r.exit_code == 0;
        out << "scenario " << id << ": " << (r.exit_code == 0 ? "PASS" : "FAIL");
        char buf[64];
        std::snprintf(buf, sizeof(buf), " (%.2fs)", r.wall_time_s);
        out << buf << "\n";
        for (const CheckResult& c : r.checks) {
            if (c.observational)
                out << "  probe " << c.name << ": value " << format_double(c.value)
                    << (c.passed ? " within " : " outside ") << format_double(c.tolerance)
                    << "\n";
            else if (!c.passed)
                out << "  check " << c.name << ": FAIL value " << format_double(c.value)
                    << " tolerance " << format_double(c.tolerance) << "\n";
        }
    }
    CheckList builtin;
    builtin_quality_checks(builtin);
    for (const CheckResult& c : builtin.checks) {
        ++rep.n_total;
        if (c.passed) ++rep.n_passed;
        all = all && c.passed;
        out << "builtin " << c.name << ": " << (c.passed ? "PASS" : "FAIL") << " (value "
            << format_double(c.value) << ", tolerance " << format_double(c.tolerance) << ")\n";
    }
    const auto t_done = std::chrono::steady_clock::now();
    rep.wall_time_s = std::chrono::duration<double>(t_done - t_begin).count();
    rep.all_passed = all;
    out << (all ? "CHECK PASSED" : "CHECK FAILED") << ": " << rep.n_passed << "/" << rep.n_total
        << " in " << format_double(rep.wall_time_s) << "s\n";
    rep.text = out.str();
    return rep;
}

int recheck_summary_file(const std::filesystem::path& summary_path) {
    std::ifstream in(summary_path, std::ios::binary);
    if (!in) throw ParseError("cannot read summary file '" + summary_path.string() + "'", 0);
    json summary;
    try {
        summary = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("summary is not valid JSON: ") + e.what(), 0);
    }
    if (!summary.contains("checks") || !summary["checks"].is_array())
        throw ParseError("summary has no checks array", 0);
    bool all = true;
    for (const json& c : summary["checks"]) {
        const double value = c.at("value").get<double>();
        const double tol = c.at("tolerance").get<double>();
        const bool observational = c.value("observational", false);
        if (!observational && !(value <= tol)) all = false;
    }
    return all ? 0 : 1;
}

std::string list_presets_text() {
    std::ostringstream out;
    out << "models:\n";
    for (const std::string& id : model_preset_ids())
        out << "  " << id << "  -  " << model_preset_description(id) << "\n";
    out << "families:\n";
    for (const std::string& tmpl : family_id_templates())
        out << "  " << tmpl << "  -  " << family_template_description(tmpl) << "\n";
    out << "scenarios:\n";
    for (const auto& [id, text] : bundled_scenarios()) {
        (void)text;
        out << "  " << id << "\n";
    }
    return out.str();
}

}  // namespace nlcm
