#ifndef WORDPERC_H
#define WORDPERC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WpStatus {
  WP_STATUS_OK = 0,
  WP_STATUS_NULL_POINTER = 1,
  WP_STATUS_INVALID_ARGUMENT = 2,
  WP_STATUS_CAP_EXCEEDED = 3,
  WP_STATUS_INTERNAL = 4,
} WpStatus;

/*
 Shape of the horizontal edge probabilities.
 */
typedef enum WpSeqKind {
  /*
   `p_i = value` for every `i`.
   */
  WP_SEQ_KIND_CONSTANT = 0,
  /*
   `p_i = 1 / (i ln i)` beyond a short prefix.
   */
  WP_SEQ_KIND_LOG_INVERSE = 1,
} WpSeqKind;

/*
 Opaque handle to a seeded configuration.
 */
typedef struct WpOracle WpOracle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failing call on this thread, or null. Valid until
 the next failing call on the same thread.
 */
const char *wp_last_error_message(void);

/*
 Creates an oracle. `k` is the truncation length.

 # Safety
 `out` must be valid for one pointer write.
 */
enum WpStatus wp_oracle_new(uint64_t seed,
                            enum WpSeqKind kind,
                            double value,
                            double epsilon,
                            uint64_t k,
                            double letter_p,
                            struct WpOracle **out);

/*
 # Safety
 `oracle` must come from [`wp_oracle_new`] and not be freed twice. Null is
 ignored.
 */
void wp_oracle_free(struct WpOracle *oracle);

/*
 Uniform attached to the edge between two sites.

 # Safety
 `oracle` must be live and `out` valid for a write.
 */
enum WpStatus wp_oracle_edge_uniform(const struct WpOracle *oracle,
                                     int64_t ax,
                                     int64_t ay,
                                     int64_t bx,
                                     int64_t by,
                                     double *out);

/*
 # Safety
 `oracle` must be live and `out` valid for a write.
 */
enum WpStatus wp_oracle_vertex_letter(const struct WpOracle *oracle,
                                      int64_t x,
                                      int64_t y,
                                      uint8_t *out);

/*
 Whether the word `letters[0..len]` is seen from `(x, y)` by a
 self-avoiding path inside the window.

 # Safety
 `letters` must point to `len` bytes (or be null with `len == 0`), and
 `oracle` and `out` must be valid.
 */
enum WpStatus wp_sees_word(const struct WpOracle *oracle,
                           int64_t x,
                           int64_t y,
                           const uint8_t *letters,
                           size_t len,
                           int64_t x_min,
                           int64_t x_max,
                           int64_t y_min,
                           int64_t y_max,
                           bool *out);

/*
 `u -> (floor(u/k), u mod k)`.

 # Safety
 `block` and `layer` must be valid for writes.
 */
enum WpStatus wp_phi(int64_t u, uint64_t k, int64_t *block, int64_t *layer);

/*
 # Safety
 `out` must be valid for a write.
 */
enum WpStatus wp_phi_inverse(int64_t block, int64_t layer, uint64_t k, int64_t *out);

/*
 Exhaustive fold check on a window.

 # Safety
 `out` must be valid for a write.
 */
enum WpStatus wp_verify_isomorphism(uint64_t k,
                                    int64_t x_min,
                                    int64_t x_max,
                                    int64_t y_min,
                                    int64_t y_max,
                                    bool *out);

/*
 Black probability over offsets `first..=last` for a constant sequence
 `p_i = value`.

 # Safety
 `exact` and `lower_bound` must be valid for writes.
 */
enum WpStatus wp_black_probability(uint64_t first,
                                   uint64_t last,
                                   double link,
                                   double letter_p,
                                   double value,
                                   uint8_t first_letter,
                                   uint8_t second_letter,
                                   double *exact,
                                   double *lower_bound);

/*
 Wilson 95% interval.

 # Safety
 All out pointers must be valid for writes.
 */
enum WpStatus wp_wilson(uint64_t successes,
                        uint64_t trials,
                        double *estimate,
                        double *ci_lo,
                        double *ci_hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WORDPERC_H */
