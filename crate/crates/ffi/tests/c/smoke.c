#include <stdio.h>
#include <string.h>

#include "landscape_lab.h"

#define CHECK(cond)                                      \
    do {                                                 \
        if (!(cond)) {                                   \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond); \
            return 1;                                    \
        }                                                \
    } while (0)

int main(void) {
    LlPotential *p = NULL;
    CHECK(ll_potential_generate("bernoulli:0.5:10", 30, 1.0, 5, &p) == LL_STATUS_OK);
    CHECK(ll_potential_len(p) == 30);

    double eig[2];
    CHECK(ll_lowest_eigenvalues(p, 16, 2, 1e-12, eig) == LL_STATUS_OK);
    CHECK(eig[0] > 0.0 && eig[0] < eig[1]);

    double ratio = 0.0;
    CHECK(ll_ground_ratio(p, 16, &ratio) == LL_STATUS_OK);
    CHECK(ratio > 1.0 && ratio < 1.7305);

    double cells[4];
    CHECK(ll_potential_cells(p, cells, 4) == LL_STATUS_BUFFER_TOO_SMALL);
    char msg[128];
    CHECK(ll_last_error_message(msg, sizeof msg) > 0);
    CHECK(strlen(msg) > 0);

    double lc, uc, r, g;
    CHECK(ll_homogenized(2.0, &lc, &uc, &r) == LL_STATUS_OK);
    CHECK(ll_invert_ratio(r, &g) == LL_STATUS_OK);
    CHECK(g > 1.999 && g < 2.001);

    ll_potential_free(p);
    printf("ok %s %.6f\n", ll_version(), ratio);
    return 0;
}
