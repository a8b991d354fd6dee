#ifndef PERMLATTICE_H
#define PERMLATTICE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_NULL_ARGUMENT = 1,
  PL_STATUS_INVALID_UTF8 = 2,
  PL_STATUS_PARSE = 3,
  PL_STATUS_DOMAIN = 4,
  PL_STATUS_NOT_ADMISSIBLE = 5,
  PL_STATUS_CAPACITY = 6,
  PL_STATUS_INTERNAL = 7,
  PL_STATUS_PANIC = 8,
} PlStatus;

typedef enum PlVerdict {
  PL_VERDICT_ADMISSIBLE = 0,
  PL_VERDICT_FAILS_NECESSARY = 1,
  PL_VERDICT_OBSTRUCTED = 2,
  PL_VERDICT_UNKNOWN = 3,
} PlVerdict;

/**
 * Opaque finite pattern.
 */
typedef struct PlPattern PlPattern;

/**
 * Opaque restricting set.
 */
typedef struct PlSet PlSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pl_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *pl_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void pl_string_free(char *s);

/**
 * Parses a preset token (`AL`, `A+`, `Aoplus`) or a list `[(0,0),(1,0)]`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PlStatus pl_set_parse(const char *text, struct PlSet **out);

/**
 * # Safety
 * `set` must come from `pl_set_parse` or be NULL.
 */
void pl_set_free(struct PlSet *set);

/**
 * Number of vectors in the set.
 *
 * # Safety
 * `set` must be a live handle.
 */
size_t pl_set_len(const struct PlSet *set);

/**
 * Toral permutations of the given shape, by exhaustive search within
 * `budget` nodes (0 selects the default). The decimal count is written to
 * `out` and must be released with `pl_string_free`.
 *
 * # Safety
 * `dims` must point to `ndims` values; `out` must be writable.
 */
enum PlStatus pl_count_toral(const struct PlSet *set,
                             const size_t *dims,
                             size_t ndims,
                             uint64_t budget,
                             char **out);

/**
 * Permutations of a box that keep every cell inside it.
 *
 * # Safety
 * As for `pl_count_toral`.
 */
enum PlStatus pl_count_box_permutations(const struct PlSet *set,
                                        const size_t *dims,
                                        size_t ndims,
                                        char **out);

/**
 * Globally admissible A_L patterns on an n x m rectangle (polynomial time).
 *
 * # Safety
 * `out` must be writable.
 */
enum PlStatus pl_count_a_l_patterns(size_t n, size_t m, char **out);

/**
 * Mahler measure of a Laurent polynomial in z, w on a `grid` x `grid`
 * roots-of-unity grid, with the grid-halving difference as error.
 *
 * # Safety
 * `poly` must be NUL-terminated; `value` and `error` must be writable.
 */
enum PlStatus pl_mahler_measure(const char *poly, size_t grid, double *value, double *error);

/**
 * Parses the pattern text format (header line then one row per y).
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be writable.
 */
enum PlStatus pl_pattern_parse(const char *text, struct PlPattern **out);

/**
 * # Safety
 * `pat` must come from `pl_pattern_parse` or be NULL.
 */
void pl_pattern_free(struct PlPattern *pat);

/**
 * Global admissibility verdict, searching obstructions up to `radius`.
 *
 * # Safety
 * `pat` must be a live handle; `verdict` must be writable.
 */
enum PlStatus pl_pattern_check(const struct PlPattern *pat, size_t radius, enum PlVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERMLATTICE_H */
