/* Compiled as plain C: the public header must be consumable without C++. */
#include <stdio.h>
#include <string.h>

#include "nlcm.h"

int main(void) {
    char* table = nlcm_list();
    if (!table || strstr(table, "central2") == NULL) {
        fprintf(stderr, "list output missing presets\n");
        return 1;
    }
    nlcm_string_free(table);

    nlcm_run* run = NULL;
    if (nlcm_run_bundled("hom2-circular", "capi-c-out", &run) != NLCM_OK) {
        fprintf(stderr, "bundled run failed: %s\n", nlcm_last_error());
        return 1;
    }
    const int code = nlcm_run_exit_code(run);
    if (strcmp(nlcm_run_id(run), "hom2-circular") != 0) {
        fprintf(stderr, "unexpected id\n");
        return 1;
    }
    nlcm_run_free(run);

    if (nlcm_run_text("garbage", NULL, &run) != NLCM_ERR_PARSE) {
        fprintf(stderr, "expected a parse error\n");
        return 1;
    }
    printf("c smoke ok, scenario exit %d\n", code);
    return code;
}
