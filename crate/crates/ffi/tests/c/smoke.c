#include <math.h>
#include <stdio.h>

#include "kkgreen.h"

#define EXPECT(cond)                                                    \
    do {                                                                \
        if (!(cond)) {                                                  \
            const char *msg = kkg_last_error();                         \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,      \
                    msg ? msg : "no message");                          \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    KkgOscillator osc = {1.0, 0.3, 0.1, 1};
    double center[3] = {0.0, 0.0, 0.0};
    KkgModel *model = NULL;
    EXPECT(kkg_model_ball(&osc, 1, center, 0.25, 0.4, &model) == KKG_STATUS_OK);

    KkgComplex eps;
    KkgComplex omega = {1.0, 0.0};
    EXPECT(kkg_model_eval(model, center, omega, &eps) == KKG_STATUS_OK);
    EXPECT(eps.im > 0.0);

    KkgComplex lower = {1.0, -0.1};
    EXPECT(kkg_model_eval(model, center, lower, &eps) == KKG_STATUS_LOWER_HALF_PLANE);
    EXPECT(kkg_last_error() != NULL);

    double kk = 1.0;
    EXPECT(kkg_kk_residual(model, center, 1e-3, 1e3, 2000, &kk) == KKG_STATUS_OK);
    EXPECT(kk < 1e-2);

    KkgGreenField *field = NULL;
    double source[3] = {0.45, 0.4, -0.42};
    EXPECT(kkg_solve_g(model, center, 1.0, 6, omega, source, KKG_METHOD_DIRECT,
                       kkg_units_natural(), &field) == KKG_STATUS_OK);
    EXPECT(kkg_green_field_len(field) == 216);
    KkgTensor t;
    double p[3];
    EXPECT(kkg_green_field_node(field, 0, p, &t) == KKG_STATUS_OK);
    EXPECT(isfinite(t.re[0][0]) && isfinite(t.im[2][2]));
    EXPECT(kkg_green_field_node(field, 216, p, &t) == KKG_STATUS_INVALID_ARGUMENT);

    kkg_green_field_free(field);
    kkg_model_free(model);
    printf("ok %s\n", kkg_version());
    return 0;
}
