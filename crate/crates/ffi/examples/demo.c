#include <stdio.h>
#include "lowerop.h"

int main(void) {
    LoOperator *j = NULL;
    char *out = NULL;

    if (lo_operator_from_json("{\"N\": 6, \"coeffs\": [[], [], [\"1\"]]}", &j) != LO_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", lo_last_error());
        return 1;
    }
    if (lo_solve(j, 2, 4, &out) != LO_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", lo_last_error());
        lo_operator_free(j);
        return 1;
    }
    printf("%s\n", out);
    lo_string_free(out);

    LoOperator *inv = NULL;
    if (lo_operator_invert(j, &inv) != LO_STATUS_DOMAIN) {
        return 1;
    }
    printf("%s\n", lo_last_error());
    lo_operator_free(j);
    printf("lowerop %s\n", lo_version());
    return 0;
}
