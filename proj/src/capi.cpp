#include "nlcm.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "nlcm/errors.hpp"
#include "nlcm/scenario.hpp"

struct nlcm_run {
    nlcm::ScenarioResult result;
};

namespace {

thread_local std::string g_last_error;

const char* default_outdir(const char* outdir) { return outdir ? outdir : "nlcm-out"; }

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int capture(int code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const nlcm::ParseError& e) {
        std::string msg = e.what();
        if (e.line > 0)
            msg += " (line " + std::to_string(e.line) + ", column " + std::to_string(e.column) +
                   ")";
        return capture(NLCM_ERR_PARSE, msg.c_str());
    } catch (const std::exception& e) {
        return capture(NLCM_ERR_RUNTIME, e.what());
    } catch (...) {
        return capture(NLCM_ERR_RUNTIME, "unknown failure");
    }
}

}  // namespace

extern "C" {

int nlcm_run_file(const char* config_path, const char* outdir, nlcm_run** out) {
    if (!config_path || !out) return capture(NLCM_ERR_BADARG, "null argument");
    return guarded([&]() -> int {
        auto* run = new nlcm_run{nlcm::run_scenario_file(config_path, default_outdir(outdir))};
        *out = run;
        return NLCM_OK;
    });
}

int nlcm_run_text(const char* config_text, const char* outdir, nlcm_run** out) {
    if (!config_text || !out) return capture(NLCM_ERR_BADARG, "null argument");
    return guarded([&]() -> int {
        auto* run = new nlcm_run{nlcm::run_scenario_text(config_text, default_outdir(outdir))};
        *out = run;
        return NLCM_OK;
    });
}

int nlcm_run_bundled(const char* scenario_id, const char* outdir, nlcm_run** out) {
    if (!scenario_id || !out) return capture(NLCM_ERR_BADARG, "null argument");
    return guarded([&]() -> int {
        for (const auto& [id, text] : nlcm::bundled_scenarios()) {
            if (id == scenario_id) {
                auto* run =
                    new nlcm_run{nlcm::run_scenario_text(text, default_outdir(outdir))};
                *out = run;
                return NLCM_OK;
            }
        }
        return capture(NLCM_ERR_BADARG,
                       ("no bundled scenario named '" + std::string(scenario_id) + "'").c_str());
    });
}

int nlcm_run_exit_code(const nlcm_run* run) { return run ? run->result.exit_code : 1; }

const char* nlcm_run_id(const nlcm_run* run) { return run ? run->result.id.c_str() : ""; }

const char* nlcm_run_summary_json(const nlcm_run* run) {
    return run ? run->result.summary_json.c_str() : "";
}

void nlcm_run_free(nlcm_run* run) { delete run; }

int nlcm_check(const char* outdir, char** report_out, int* exit_code_out) {
    return guarded([&]() -> int {
        const nlcm::CheckReport rep = nlcm::run_all_checks(default_outdir(outdir));
        if (report_out) *report_out = dup_string(rep.text);
        if (exit_code_out) *exit_code_out = rep.all_passed ? 0 : 1;
        return NLCM_OK;
    });
}

int nlcm_recheck(const char* summary_path, int* exit_code_out) {
    if (!summary_path) return capture(NLCM_ERR_BADARG, "null argument");
    return guarded([&]() -> int {
        const int code = nlcm::recheck_summary_file(summary_path);
        if (exit_code_out) *exit_code_out = code;
        return NLCM_OK;
    });
}

char* nlcm_list(void) {
    try {
        return dup_string(nlcm::list_presets_text());
    } catch (...) {
        return dup_string("");
    }
}

void nlcm_string_free(char* s) { std::free(s); }

const char* nlcm_last_error(void) { return g_last_error.c_str(); }

const char* nlcm_version(void) { return "1.0.0"; }

}  // extern "C"
