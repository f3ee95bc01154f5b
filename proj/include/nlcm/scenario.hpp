#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nlcm {

/// One verified quantity of a scenario run.  A check passes iff
/// value <= tolerance; observational probes are reported the same way but
/// never fail a run.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    bool observational = false;
};

struct ScenarioResult {
    std::string id;
    bool passed = false;  // all asserted checks passed
    int exit_code = 0;    // 0 ok, 1 failed invariant / unexpected stop
    std::vector<CheckResult> checks;
    std::string summary_json;  // the full machine-readable record
    std::filesystem::path samples_path;  // empty when output.format = none
    std::filesystem::path summary_path;
    double wall_time_s = 0.0;
};

/// Run a scenario from config text (see README for the key-value format).
/// Throws ParseError for malformed or semantically invalid configs; numeric
/// trouble during the run is reported through checks, not exceptions.
ScenarioResult run_scenario_text(const std::string& text,
                                 const std::filesystem::path& outdir);

ScenarioResult run_scenario_file(const std::filesystem::path& config_path,
                                 const std::filesystem::path& outdir);

/// Bundled scenario configs, ordered by id.
const std::vector<std::pair<std::string, std::string>>& bundled_scenarios();

struct CheckReport {
    bool all_passed = false;
    int n_passed = 0;
    int n_total = 0;
    double wall_time_s = 0.0;
    std::string text;  // one line per scenario / built-in check
};

/// The acceptance entry point: every bundled scenario plus the built-in
/// integrator-quality and quadrature cross-checks.
CheckReport run_all_checks(const std::filesystem::path& outdir);

/// Re-evaluate the pass/fail decisions recorded in a summary JSON file.
/// Returns the recomputed exit code (0/1); throws ParseError on bad input.
int recheck_summary_file(const std::filesystem::path& summary_path);

/// Human-readable table of model presets, family templates and bundled
/// scenario ids.
std::string list_presets_text();

}  // namespace nlcm
