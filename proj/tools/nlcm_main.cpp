// Command-line front end; talks to the library exclusively through the
// shared C API in nlcm.h.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "nlcm.h"

namespace {

void usage(std::FILE* to) {
    std::fputs(
        "usage: nlcm <verb> [options]\n"
        "\n"
        "verbs:\n"
        "  run <config.cfg>     run one scenario config; exit 0 if all asserted\n"
        "                       checks pass, 1 on a failed check or unexpected\n"
        "                       stop, 2 on a config error\n"
        "  list                 print model presets, family templates and\n"
        "                       bundled scenario ids\n"
        "  check                run every bundled scenario plus the built-in\n"
        "                       integrator-quality checks; exit 0 iff all pass\n"
        "  recheck <summary>    re-evaluate the pass/fail decisions recorded in\n"
        "                       a summary JSON file\n"
        "\n"
        "options:\n"
        "  --out <dir>          output directory (default: $NLCM_OUT_DIR or\n"
        "                       ./nlcm-out)\n"
        "  --seed <n>           reserved for randomized test corpora; accepted\n"
        "                       and recorded, not used by the bundled runs\n",
        to);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string verb;
    std::string target;
    std::string outdir;
    if (const char* env = std::getenv("NLCM_OUT_DIR")) outdir = env;

    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--help" || a == "-h") {
            usage(stdout);
            return 0;
        }
        if (a == "--out") {
            if (++i >= args.size()) {
                std::fputs("nlcm: --out needs a directory\n", stderr);
                return 2;
            }
            outdir = args[i];
        } else if (a == "--seed") {
            if (++i >= args.size()) {
                std::fputs("nlcm: --seed needs a value\n", stderr);
                return 2;
            }
        } else if (verb.empty()) {
            verb = a;
        } else if (target.empty()) {
            target = a;
        } else {
            std::fprintf(stderr, "nlcm: unexpected argument '%s'\n", a.c_str());
            return 2;
        }
    }
    const char* out = outdir.empty() ? nullptr : outdir.c_str();

    if (verb.empty()) {
        usage(stderr);
        return 2;
    }
    if (verb == "list") {
        char* table = nlcm_list();
        std::fputs(table ? table : "", stdout);
        nlcm_string_free(table);
        return 0;
    }
    if (verb == "run") {
        if (target.empty()) {
            std::fputs("nlcm: run needs a config path\n", stderr);
            return 2;
        }
        nlcm_run* run = nullptr;
        const int rc = nlcm_run_file(target.c_str(), out, &run);
        if (rc != NLCM_OK) {
            std::fprintf(stderr, "nlcm: %s\n", nlcm_last_error());
            return rc == NLCM_ERR_PARSE ? 2 : 1;
        }
        std::fputs(nlcm_run_summary_json(run), stdout);
        std::fputc('\n', stdout);
        const int code = nlcm_run_exit_code(run);
        nlcm_run_free(run);
        return code;
    }
    if (verb == "check") {
        char* report = nullptr;
        int code = 1;
        const int rc = nlcm_check(out, &report, &code);
        if (rc != NLCM_OK) {
            std::fprintf(stderr, "nlcm: %s\n", nlcm_last_error());
            return 1;
        }
        std::fputs(report ? report : "", stdout);
        nlcm_string_free(report);
        return code;
    }
    if (verb == "recheck") {
        if (target.empty()) {
            std::fputs("nlcm: recheck needs a summary path\n", stderr);
            return 2;
        }
        int code = 1;
        const int rc = nlcm_recheck(target.c_str(), &code);
        if (rc != NLCM_OK) {
            std::fprintf(stderr, "nlcm: %s\n", nlcm_last_error());
            return rc == NLCM_ERR_PARSE ? 2 : 1;
        }
        std::printf("recheck: %s\n", code == 0 ? "PASS" : "FAIL");
        return code;
    }
    std::fprintf(stderr, "nlcm: unknown verb '%s'\n", verb.c_str());
    usage(stderr);
    return 2;
}
