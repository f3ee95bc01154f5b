/* C API of the nonlocal-constants-of-motion library.
 *
 * The library runs scenario configs (flat "key = value" text, see README)
 * against the built-in dynamical models, writes a samples table and a
 * machine-readable summary per scenario, and exposes the bundled
 * verification suite behind nlcm_check.
 *
 * All functions return a status code; details of a failure are available
 * from nlcm_last_error() on the same thread.  Scenario outcomes (an
 * invariant out of tolerance) are not errors: the run handle reports them
 * through nlcm_run_exit_code.
 */
#ifndef NLCM_H
#define NLCM_H

#ifdef __cplusplus
extern "C" {
#endif

enum {
    NLCM_OK = 0,
    NLCM_ERR_PARSE = 2,   /* config or summary could not be parsed/validated */
    NLCM_ERR_RUNTIME = 3, /* evaluation failed (precondition, I/O, ...) */
    NLCM_ERR_BADARG = 4   /* null pointer or unknown id */
};

typedef struct nlcm_run nlcm_run;

/* Run a scenario from a config file / from config text / by bundled id.
 * Artifacts are written under outdir (created if missing; pass NULL for
 * "nlcm-out").  On NLCM_OK the caller owns *out and must free it. */
int nlcm_run_file(const char* config_path, const char* outdir, nlcm_run** out);
int nlcm_run_text(const char* config_text, const char* outdir, nlcm_run** out);
int nlcm_run_bundled(const char* scenario_id, const char* outdir, nlcm_run** out);

/* 0 when every asserted check passed, 1 otherwise. */
int nlcm_run_exit_code(const nlcm_run* run);
const char* nlcm_run_id(const nlcm_run* run);
/* Full summary record (JSON, same content as the .summary.json artifact). */
const char* nlcm_run_summary_json(const nlcm_run* run);
void nlcm_run_free(nlcm_run* run);

/* Run every bundled scenario plus the built-in integrator-quality and
 * quadrature checks.  *report_out (if non-NULL) receives a malloc'ed
 * human-readable report to release with nlcm_string_free.  *exit_code_out
 * receives 0/1.  Returns NLCM_OK unless the suite itself could not run. */
int nlcm_check(const char* outdir, char** report_out, int* exit_code_out);

/* Re-evaluate the pass/fail decisions stored in a summary JSON file.
 * *exit_code_out receives the recomputed 0/1 decision. */
int nlcm_recheck(const char* summary_path, int* exit_code_out);

/* Table of model presets, family templates and bundled scenario ids.
 * Returns a malloc'ed string to release with nlcm_string_free. */
char* nlcm_list(void);

void nlcm_string_free(char* s);

/* Message of the last failure on this thread (never NULL). */
const char* nlcm_last_error(void);

const char* nlcm_version(void);

#ifdef __cplusplus
}
#endif

#endif /* NLCM_H */
