#include <math.h>
#include <stdio.h>
#include <string.h>

#include "cabello.h"

static int fail(const char *what) {
    char *msg = cabello_last_error();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    cabello_string_free(msg);
    return 1;
}

int main(void) {
    double v = 0.0;
    if (cabello_local_bound(0.1, &v) != CABELLO_STATUS_OK || fabs(v - 0.2) > 1e-9) return fail("local bound");

    if (cabello_local_bound(-1.0, &v) != CABELLO_STATUS_INVALID_ARGUMENT) return fail("negative eps accepted");
    char *msg = cabello_last_error();
    if (msg == NULL || strlen(msg) == 0) return fail("missing error message");
    cabello_string_free(msg);

    CabelloOptOptions opts = cabello_opt_options_default();
    opts.starts = 8;
    CabelloOptResult *res = NULL;
    if (cabello_optimize_ideal(&opts, &res) != CABELLO_STATUS_OK) return fail("optimize");
    CabelloOptSummary s;
    if (cabello_opt_result_summary(res, &s) != CABELLO_STATUS_OK) return fail("summary");
    cabello_opt_result_free(res);
    if (fabs(s.score - 0.1078127177) > 1e-8) return fail("optimum value");

    CabelloNpaResult npa;
    if (cabello_npa_upper_bound(CABELLO_NPA_LEVEL_TWO, 0.0, NULL, &npa) != CABELLO_STATUS_OK) return fail("npa");
    if (npa.value < s.score - 1e-6) return fail("npa below optimum");

    double grid[2] = {0.0, 0.05};
    CabelloSweep *sw = NULL;
    if (cabello_sweep(grid, 2, CABELLO_NPA_LEVEL_TWO, &opts, NULL, 0, &sw) != CABELLO_STATUS_OK) return fail("sweep");
    if (cabello_sweep_len(sw) != 2) return fail("sweep length");
    char *csv = cabello_sweep_to_csv(sw);
    if (csv == NULL || strncmp(csv, "eps,local_bound", 15) != 0) return fail("csv");
    cabello_string_free(csv);
    cabello_sweep_free(sw);

    printf("ok %s\n", cabello_version());
    return 0;
}
