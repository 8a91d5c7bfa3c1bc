#include <stdio.h>
#include <string.h>
#include "hecke.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        HkStatus s_ = (call);                                              \
        if (s_ != HK_STATUS_OK) {                                          \
            fprintf(stderr, "%s failed: %d %s\n", #call, (int)s_,          \
                    hk_last_error() ? hk_last_error() : "");               \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    HkAlgebra *alg = NULL;
    CHECK(hk_algebra_new("GL2", 5, 1, &alg));

    int64_t exps[2] = {1, 0};
    uint32_t unram[2] = {1, 1};
    HkModule *ind = NULL, *dual = NULL, *twice = NULL;
    CHECK(hk_module_induced(alg, exps, unram, 2, &ind));
    CHECK(hk_module_dual(ind, &dual));
    CHECK(hk_module_dual(dual, &twice));
    HkIso iso;
    CHECK(hk_module_is_isomorphic(ind, twice, &iso));
    if (iso != HK_ISO_YES || hk_module_dim(ind) != 2) {
        fprintf(stderr, "double dual mismatch\n");
        return 1;
    }

    char *json = NULL;
    bool passed = false;
    CHECK(hk_run_fixture("sl2.trivial", 5, 1, 1, false, &json, &passed));
    if (!passed || strstr(json, "\"status\":\"pass\"") == NULL) {
        fprintf(stderr, "sl2.trivial did not pass\n");
        return 1;
    }
    hk_string_free(json);

    HkModule *bad = NULL;
    if (hk_module_supersingular(alg, 99, &bad) != HK_STATUS_INVALID_ARGUMENT || hk_last_error() == NULL) {
        fprintf(stderr, "expected an invalid-argument error\n");
        return 1;
    }

    hk_module_free(twice);
    hk_module_free(dual);
    hk_module_free(ind);
    hk_algebra_free(alg);
    printf("ok\n");
    return 0;
}
