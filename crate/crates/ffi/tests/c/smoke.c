#include <math.h>
#include <stdio.h>
#include "vsal.h"

#define CHECK(expr)                                                    \
    do {                                                               \
        if (!(expr)) {                                                 \
            fprintf(stderr, "check failed line %d: %s\n", __LINE__, #expr); \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    double sim_entries[9] = {1.0, 0.9, 0.1, 0.9, 1.0, 0.1, 0.1, 0.1, 1.0};
    VsalSimilarity *sim = NULL;
    CHECK(vsal_similarity_new(sim_entries, 3, &sim) == VSAL_STATUS_OK);
    uint8_t mask[3];
    CHECK(vsal_select(sim, 0.2, 1e-8, 0, mask, 3) == VSAL_STATUS_OK);
    CHECK(mask[0] == 1 && mask[1] == 0 && mask[2] == 1);
    double value = 0.0;
    CHECK(vsal_objective(sim, mask, 3, 0.2, 1e-8, &value) == VSAL_STATUS_OK);
    CHECK(fabs(value - 1.08) < 1e-6);
    vsal_similarity_free(sim);

    VsalFixation fix = {0.0, 10.0, 10.0};
    VsalMap *density = NULL;
    CHECK(vsal_density_map(&fix, 1, 0.0, 32, 32, 4.0, 0.1, 1e-4, &density) == VSAL_STATUS_OK);
    double values[32 * 32];
    CHECK(vsal_map_copy_values(density, values, 32 * 32) == VSAL_STATUS_OK);
    CHECK(fabs(values[10 * 32 + 10] - 1.0) < 1e-12);

    VsalMap *fused = NULL;
    double lambda = -1.0;
    CHECK(vsal_fuse(density, density, 2.1, &fused, &lambda) == VSAL_STATUS_OK);
    CHECK(lambda > 0.0 && lambda <= 1.0);

    VsalMap *bad = NULL;
    CHECK(vsal_map_new(2, 2, NULL, &bad) == VSAL_STATUS_NULL_POINTER);
    CHECK(vsal_last_error_message() != NULL);

    vsal_map_free(fused);
    vsal_map_free(density);
    printf("ok %s\n", vsal_version());
    return 0;
}
