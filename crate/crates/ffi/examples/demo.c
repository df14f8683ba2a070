#include <math.h>
#include <stdio.h>

#include "framekit.h"

int main(void) {
    double seed[2] = {0.5, 0.5};
    FkFrame *frame = NULL;
    if (fk_construct(seed, 2, &frame) != FK_STATUS_OK) {
        fprintf(stderr, "construct: %s\n", fk_last_error());
        return 1;
    }

    FkTightness t;
    fk_verify(frame, 1e-9, &t);
    printf("framekit %s: N = %zu, A = %.12f, B = %.12f, parseval = %d\n", fk_version(),
           (size_t)fk_frame_count(frame), t.lower_bound, t.upper_bound, t.is_parseval);

    double data[6];
    fk_frame_copy_data(frame, data, 6);
    double unit[6];
    for (int j = 0; j < 3; j++) {
        double len = hypot(data[2 * j], data[2 * j + 1]);
        unit[2 * j] = data[2 * j] / len;
        unit[2 * j + 1] = data[2 * j + 1] / len;
    }
    FkFrame *u = NULL;
    fk_frame_new(2, 3, unit, &u);
    FkVerdict v;
    double weights[3];
    fk_decide_scalability(u, 1e-9, &v, weights, 3);
    printf("scalable = %d, weights = %.12f %.12f %.12f\n", v.scalable, weights[0], weights[1], weights[2]);

    double too_long[2] = {0.8, 0.6};
    FkFrame *bad = NULL;
    FkStatus status = fk_construct(too_long, 2, &bad);
    printf("seed (0.8, 0.6): status %d (%s)\n", (int)status, fk_last_error());

    fk_frame_free(u);
    fk_frame_free(frame);
    return (t.is_parseval && v.scalable && status == FK_STATUS_SEED_TOO_LONG) ? 0 : 1;
}
