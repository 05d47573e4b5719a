#include <math.h>
#include <stdio.h>
#include "compact_pinv.h"

int main(void) {
    const double a[6] = {1, 2, 3, 2, 4, 6};
    CpMatrix *m = cp_matrix_new_real(2, 3, a);
    CpFactor *f = NULL;
    if (cp_factorize(m, CP_PIVOT_SIMPLE, 1e-12, &f) != CP_STATUS_OK) return 1;
    if (cp_factor_rank(f) != 1) return 2;
    CpMatrix *b = cp_matrix_new_real(2, 3, a);
    if (cp_prepare_row_projector(f) != CP_STATUS_OK) return 3;
    if (cp_projector_apply(f, b, NULL) != CP_STATUS_OK) return 4;
    double out[6];
    cp_matrix_copy_out(b, out, 6);
    for (int i = 0; i < 6; i++)
        if (fabs(out[i] - a[i]) > 1e-13) return 5;
    if (cp_pinv_apply(f, b, m) != CP_STATUS_WRONG_STATE) return 6;
    if (cp_last_error() == NULL) return 7;
    cp_matrix_free(m);
    cp_matrix_free(b);
    cp_factor_free(f);
    puts("ok");
    return 0;
}
