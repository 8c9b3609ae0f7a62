#include <math.h>
#include <stdio.h>
#include <string.h>

#include "fermion_shadows.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            const char *m = fs_last_error_message();                  \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,   \
                    m ? m : "no message");                            \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    double x;
    uint64_t c;
    CHECK(fs_shadow_norm_sq(50, 2, &x) == FS_STATUS_OK && x == 3201.0);
    CHECK(fs_eqot(4, 8, &c) == FS_STATUS_OK && c == 1215);
    CHECK(fs_strategy_count(FS_STRATEGY_MT2, 2, 8, &c) == FS_STATUS_OK && c == 6833);
    CHECK(fs_channel_eigenvalue(2, 3, &x) == FS_STATUS_INVALID_ARGUMENT);
    CHECK(fs_last_error_message() != NULL);

    FsPlan *plan = NULL;
    CHECK(fs_plan_new_coverage(3, 1, FS_ENSEMBLE_FGU, FS_MAPPING_BRAVYI_KITAEV, 10, 1, &plan) == FS_STATUS_OK);
    char *json = NULL;
    CHECK(fs_plan_to_json(plan, &json) == FS_STATUS_OK && strstr(json, "\"settings\"") != NULL);
    fs_string_free(json);

    FsState *state = NULL;
    CHECK(fs_state_random(FS_MAPPING_BRAVYI_KITAEV, 3, 7, &state) == FS_STATUS_OK);
    FsRdm *rdm = NULL;
    CHECK(fs_estimate_rdm(state, plan, 1, 100, 2, &rdm) == FS_STATUS_OK);
    size_t dim = 0;
    CHECK(fs_rdm_dim(rdm, &dim) == FS_STATUS_OK && dim == 3);
    double re, im;
    CHECK(fs_rdm_get(rdm, 0, 1, &re, &im) == FS_STATUS_OK && isfinite(re));

    fs_rdm_free(rdm);
    fs_state_free(state);
    fs_plan_free(plan);
    printf("ok %s\n", fs_version());
    return 0;
}
