#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nlcm/errors.hpp"
#include "nlcm/scenario.hpp"

using namespace nlcm;
namespace fs = std::filesystem;

namespace {

const fs::path kOut = "scenario-test-out";

std::string minimal_config(const std::string& extra = "") {
    return "id = mini\n"
           "model.id = central2\n"
           "family = rot:0,1\n"
           "initial.q = 1 0\n"
           "initial.v = 0 1\n"
           "horizon.t_end = 1\n" +
           extra;
}

const std::string& bundled_text(const std::string& id) {
    for (const auto& [sid, text] : bundled_scenarios())
        if (sid == id) return text;
    throw std::runtime_error("no bundled scenario " + id);
}

}  // namespace

TEST_CASE("config parser reports line numbers") {
    SUBCASE("missing separator") {
        try {
            run_scenario_text("id = x\nmodel.id central2\n", kOut);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("missing model id") {
        CHECK_THROWS_AS(run_scenario_text("id = x\ninitial.q = 1\ninitial.v = 1\n", kOut),
                        ParseError);
    }
    SUBCASE("unknown key") {
        CHECK_THROWS_AS(run_scenario_text(minimal_config("frobnicate = 1\n"), kOut),
                        ParseError);
    }
    SUBCASE("bad number") {
        CHECK_THROWS_AS(run_scenario_text(minimal_config("integrator.rtol = tight\n"), kOut),
                        ParseError);
    }
    SUBCASE("duplicate scalar key") {
        CHECK_THROWS_AS(run_scenario_text(minimal_config("horizon.t_end = 3\n"), kOut),
                        ParseError);
    }
    SUBCASE("mismatched state lengths") {
        CHECK_THROWS_AS(
            run_scenario_text("id = x\nmodel.id = central2\ninitial.q = 1 0\n"
                              "initial.v = 1\nhorizon.t_end = 1\n",
                              kOut),
            ParseError);
    }
    SUBCASE("inapplicable analysis") {
        CHECK_THROWS_AS(run_scenario_text(minimal_config("assert.viscous_monotone = 1e-8\n"),
                                          kOut),
                        ParseError);
    }
    SUBCASE("unknown model preset") {
        CHECK_THROWS_AS(run_scenario_text("id = x\nmodel.id = pendulum\ninitial.q = 1\n"
                                          "initial.v = 0\nhorizon.t_end = 1\n",
                                          kOut),
                        ParseError);
    }
    SUBCASE("comments and blank lines are fine") {
        const ScenarioResult r =
            run_scenario_text("# header\n\n" + minimal_config("# trailing\n"), kOut);
        CHECK(r.exit_code == 0);
    }
}

TEST_CASE("bundled scenarios are packaged and well-formed") {
    const auto& all = bundled_scenarios();
    CHECK(all.size() >= 8);
    for (const auto& [id, text] : all) {
        CAPTURE(id);
        CHECK(text.find("id = " + id) != std::string::npos);
    }
    const std::string listing = list_presets_text();
    CHECK(listing.find("mb-cons") != std::string::npos);
    CHECK(listing.find("hshift:a") != std::string::npos);
    CHECK(listing.find("hom2-circular") != std::string::npos);
}

TEST_CASE("a bundled scenario runs green and writes its artifacts") {
    const ScenarioResult r = run_scenario_text(bundled_text("hom2-circular"), kOut);
    CHECK(r.exit_code == 0);
    CHECK(r.passed);
    CHECK(fs::exists(r.samples_path));
    CHECK(fs::exists(r.summary_path));
    CHECK(!fs::exists(r.summary_path.string() + ".tmp"));

    // Stable CSV header: t, coordinates, velocities, one column per constant
    // (names containing commas are quoted).
    std::ifstream csv(r.samples_path);
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("t,q0,q1,v0,v1,\"c:rot:0,1\",c:tshift,c:scale2", 0) == 0);

    const auto summary = nlohmann::json::parse(r.summary_json);
    CHECK(summary.at("id") == "hom2-circular");
    CHECK(summary.at("passed") == true);
    CHECK(summary.at("status") == "completed");
    CHECK(summary.at("checks").size() >= 5);
    // The radial law column is emitted for the plots.
    CHECK(header.find("law_r2") != std::string::npos);
}

TEST_CASE("failed tolerances give exit code 1, not an exception") {
    const ScenarioResult r =
        run_scenario_text(minimal_config("assert.drift_rel = 1e-30\n"), kOut);
    CHECK(r.exit_code == 1);
    CHECK(!r.passed);
}

TEST_CASE("unexpected blow-up fails the run") {
    // Backward free quadratic drag blows up; the config expects completion.
    const std::string cfg =
        "id = surprise\n"
        "model.id = hydraulic\n"
        "model.u0 = 0\n"
        "initial.q = 0\n"
        "initial.v = 1\n"
        "horizon.t_end = -2\n";
    const ScenarioResult r = run_scenario_text(cfg, kOut);
    CHECK(r.exit_code == 1);
    // Same run, declared: passes.
    const ScenarioResult ok = run_scenario_text(
        "id = declared\nmodel.id = hydraulic\nmodel.u0 = 0\ninitial.q = 0\n"
        "initial.v = 1\nhorizon.t_end = -2\nexpect.status = blew_up\n",
        kOut);
    CHECK(ok.exit_code == 0);
}

TEST_CASE("summary rechecks to the same decision") {
    for (const char* id : {"hom2-circular", "hydraulic-blowup-free"}) {
        const ScenarioResult r = run_scenario_text(bundled_text(id), kOut);
        CHECK(recheck_summary_file(r.summary_path) == r.exit_code);
    }
    // A tampered tolerance flips the decision.
    const ScenarioResult r = run_scenario_text(bundled_text("hom2-circular"), kOut);
    auto summary = nlohmann::json::parse(r.summary_json);
    summary["checks"][1]["value"] = 1e10;
    const fs::path tampered = kOut / "tampered.summary.json";
    std::ofstream(tampered) << summary.dump();
    CHECK(recheck_summary_file(tampered) == 1);
    CHECK_THROWS_AS(recheck_summary_file(kOut / "missing.json"), ParseError);
}

TEST_CASE("scenario runs are deterministic") {
    const ScenarioResult a = run_scenario_text(bundled_text("hom2-scatter"), kOut);
    const ScenarioResult b = run_scenario_text(bundled_text("hom2-scatter"), kOut);
    auto ja = nlohmann::json::parse(a.summary_json);
    auto jb = nlohmann::json::parse(b.summary_json);
    ja.erase("wall_time_s");
    jb.erase("wall_time_s");
    CHECK(ja == jb);
}

TEST_CASE("json samples format is an alternative to csv") {
    const ScenarioResult r = run_scenario_text(
        minimal_config("output.format = json\noutput.path = mini-json\n"), kOut);
    CHECK(r.exit_code == 0);
    std::ifstream in(r.samples_path);
    const auto rows = nlohmann::json::parse(in);
    CHECK(rows.is_array());
    CHECK(rows.size() > 2);
    CHECK(rows[0].contains("t"));
    CHECK(rows[0].contains("q0"));
}
