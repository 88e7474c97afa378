#include <stdio.h>
#include "wordperc.h"

int main(void) {
    WpOracle *o = NULL;
    if (wp_oracle_new(7, WP_SEQ_KIND_CONSTANT, 1.0, 1.0, 16, 0.5, &o) != WP_STATUS_OK) return 1;
    uint8_t letter = 0;
    if (wp_oracle_vertex_letter(o, 1, 0, &letter) != WP_STATUS_OK) return 2;
    bool seen = false;
    if (wp_sees_word(o, 0, 0, &letter, 1, -3, 3, -3, 3, &seen) != WP_STATUS_OK || !seen) return 3;
    double u = 0.0;
    if (wp_oracle_edge_uniform(o, 0, 0, 1, 1, &u) != WP_STATUS_INVALID_ARGUMENT) return 4;
    if (wp_last_error_message() == NULL) return 5;
    wp_oracle_free(o);

    int64_t block = 0, layer = 0;
    if (wp_phi(5, 3, &block, &layer) != WP_STATUS_OK || block != 1 || layer != 2) return 6;
    bool iso = false;
    if (wp_verify_isomorphism(3, 0, 29, 0, 4, &iso) != WP_STATUS_OK || !iso) return 7;
    double est, lo, hi;
    if (wp_wilson(50, 100, &est, &lo, &hi) != WP_STATUS_OK || est != 0.5) return 8;
    printf("ok\n");
    return 0;
}
