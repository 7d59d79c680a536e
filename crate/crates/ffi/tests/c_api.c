#include <math.h>
#include <stdio.h>
#include <string.h>

#include "kerrmodes.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "check failed line %d: %s (%s)\n",      \
                    __LINE__, #cond, km_last_error());               \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    KmLayer left = {KM_MODEL_DRUDE, 0.5, 0.7, 0.0, {0.0, 0.0}, {1.0, 0.0}};
    KmLayer right = left;
    right.damping = -0.7;
    KmGeometry *g = NULL;
    CHECK(km_geometry_two_layer(&left, &right, &g) == KM_STATUS_OK);

    KmRegion r = {0.1, 3.0, -1.0, 1.0};
    KmComplex w[8];
    size_t n = 0;
    CHECK(km_eigs2(1.0, g, &r, w, 8, &n) == KM_STATUS_OK);
    int found = -1;
    for (size_t i = 0; i < n; i++)
        if (fabs(w[i].re - 1.7914) < 1e-3) found = (int)i;
    CHECK(found >= 0);
    CHECK(km_eigs2(1.0, g, &r, w, 0, &n) == KM_STATUS_BUFFER_TOO_SMALL && n >= 1);

    KmComplex nu;
    CHECK(km_nu(1.0, g, w[found], 40.0, 999, &nu, NULL) == KM_STATUS_OK);
    CHECK(fabs(nu.re + 0.2572) < 1e-3);

    KmBranch *b = NULL;
    CHECK(km_bifurcate(1.0, g, w[found], 40.0, 999, 1e-3, 1e-2, 4, &b) == KM_STATUS_OK);
    CHECK(km_branch_len(b) == 4 && !km_branch_truncated(b));
    KmBranchPoint p;
    CHECK(km_branch_point(b, 3, &p) == KM_STATUS_OK);
    CHECK(fabs(p.omega.im) < 1e-8 && p.residual_norm <= 1e-10);
    CHECK(km_branch_point(b, 4, &p) == KM_STATUS_INVALID_ARGUMENT);
    km_branch_free(b);

    KmGeometry *bad = NULL;
    CHECK(km_geometry_sandwich(&left, &left, &right, -1.0, &bad) == KM_STATUS_INVALID_ARGUMENT);
    CHECK(strlen(km_last_error()) > 0 && bad == NULL);
    CHECK(km_eigs2(1.0, NULL, &r, w, 8, &n) == KM_STATUS_NULL_POINTER);

    km_geometry_free(g);
    printf("c api ok, kerrmodes %s\n", km_version());
    return 0;
}
