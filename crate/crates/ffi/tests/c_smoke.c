#include <stdio.h>
#include <string.h>
#include "prevlab.h"

int main(void) {
    PrevlabPoly *p = NULL;
    if (prevlab_poly_parse("poly 2 1\n1 0 : 2\n0 2 : 1\n", &p) != PREVLAB_STATUS_OK) return 1;
    double x[2] = {1.5, 2.0}, y = 0.0;
    if (prevlab_poly_eval(p, x, 2, &y, 1) != PREVLAB_STATUS_OK || y != 7.0) return 2;
    prevlab_poly_free(p);

    PrevlabPoly *bad = NULL;
    if (prevlab_poly_parse("poly 2 1\n1 : 2\n", &bad) != PREVLAB_STATUS_PARSE || bad != NULL) return 3;
    char msg[256];
    size_t len = 0;
    if (prevlab_last_error(msg, sizeof msg, &len) != PREVLAB_STATUS_OK || strstr(msg, "line 2") == NULL) return 4;

    double m = 0.0;
    if (prevlab_binary_shift_measure(5, 30, &m) != PREVLAB_STATUS_OK || !(m > 0.0 && m < 1.0 / 32)) return 5;
    printf("ok %s\n", prevlab_version());
    return 0;
}
