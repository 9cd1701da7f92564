#ifndef LOWEROP_H
#define LOWEROP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LO_STATUS_OK = 0,
  LO_STATUS_NULL_POINTER = 1,
  LO_STATUS_INVALID_UTF8 = 2,
  LO_STATUS_PARSE = 3,
  /**
   * The library rejected the input; `lo_last_error` holds the error code
   * and message.
   */
  LO_STATUS_DOMAIN = 4,
  LO_STATUS_PANIC = 5,
} LoStatus;

/**
 * Opaque operator handle.
 */
typedef struct LoOperator LoOperator;

/**
 * Parses an operator from JSON `{"N": n, "coeffs": [...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
LoStatus lo_operator_from_json(const char *json, LoOperator **out);

/**
 * Builds the operator whose images of `1, x, ..., x^N` are the given JSON
 * array of polynomials.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
LoStatus lo_operator_from_images(const char *json, LoOperator **out);

/**
 * # Safety
 * `op` must be null or a handle from this library that was not yet freed.
 */
void lo_operator_free(LoOperator *op);

/**
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
LoStatus lo_operator_to_json(const LoOperator *op, char **out);

/**
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
LoStatus lo_operator_horizon(const LoOperator *op, size_t *out);

/**
 * Applies the operator to a polynomial given as a JSON coefficient array,
 * lowest degree first.
 *
 * # Safety
 * `op` must be a live handle, `poly` NUL-terminated, `out` writable.
 */
LoStatus lo_operator_apply(const LoOperator *op, const char *poly, char **out);

/**
 * `outer ∘ inner`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
LoStatus lo_operator_compose(const LoOperator *outer, const LoOperator *inner, LoOperator **out);

/**
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
LoStatus lo_operator_invert(const LoOperator *op, LoOperator **out);

/**
 * Writes the lowering order `k` to `out_k`.
 *
 * # Safety
 * `op` must be a live handle; `out_k` must be writable.
 */
LoStatus lo_operator_lowering_order(const LoOperator *op, size_t *out_k);

/**
 * Solves for the orthogonal sequence fixed by an order-`k` operator through
 * degree `n`. The result is JSON with keys `k`, `solution`, `lambdas`,
 * `structure` and `polys`.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
LoStatus lo_solve(const LoOperator *op, uint32_t k, size_t n, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library that was not yet
 * freed.
 */
void lo_string_free(char *s);

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *lo_last_error(void);

const char *lo_version(void);

#endif  /* LOWEROP_H */
