#ifndef BIC_H
#define BIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BicSetup {
  BIC_SETUP_R0RL = 0,
  BIC_SETUP_RLRM = 1,
} BicSetup;

typedef enum BicStatus {
  BIC_STATUS_OK = 0,
  BIC_STATUS_NULL_POINTER = 1,
  BIC_STATUS_INVALID_ARGUMENT = 2,
  BIC_STATUS_PARSE_ERROR = 3,
  BIC_STATUS_CONSTRUCTION_FAILED = 4,
  BIC_STATUS_IO_ERROR = 5,
  BIC_STATUS_INTERNAL = 6,
} BicStatus;

typedef enum BicVerdict {
  BIC_VERDICT_TIGHT_PROVEN = 0,
  BIC_VERDICT_TIGHT_IF_CONJECTURE = 1,
  BIC_VERDICT_GAP = 2,
} BicVerdict;

/**
 * Computed rate region of one instance.
 */
typedef struct BicRegion BicRegion;

/**
 * A linear scheme.
 */
typedef struct BicScheme BicScheme;

/**
 * Reduced fraction, `den > 0`.
 */
typedef struct BicRational {
  int64_t num;
  int64_t den;
} BicRational;

/**
 * Rate pair normalized by n: `(R_L, R_0)` or `(R_M, R_L)`.
 */
typedef struct BicPoint {
  struct BicRational x;
  struct BicRational y;
} BicPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after success.
 * The pointer stays valid until the next library call on this thread.
 */
const char *bic_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bic_string_free(char *s);

/**
 * Computes inner hull, outer bounds and tightness for one instance.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to be
 * released with [`bic_region_free`].
 */
enum BicStatus bic_region_compute(enum BicSetup setup,
                                  uint32_t subcarriers,
                                  uint32_t interfered,
                                  uint32_t n,
                                  uint32_t k,
                                  struct BicRegion **out);

/**
 * # Safety
 * `region` must be null or a handle from [`bic_region_compute`].
 */
void bic_region_free(struct BicRegion *region);

/**
 * # Safety
 * `region` must be a live handle and `out` a valid pointer.
 */
enum BicStatus bic_region_verdict(const struct BicRegion *region, enum BicVerdict *out);

/**
 * Number of distinct achievable corner points; 0 for a null handle.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
size_t bic_region_corner_count(const struct BicRegion *region);

/**
 * # Safety
 * `region` must be a live handle and `out` a valid pointer.
 */
enum BicStatus bic_region_corner(const struct BicRegion *region,
                                 size_t index,
                                 struct BicPoint *out);

/**
 * The region as JSON (same record as the command-line tool), or null on
 * failure. Release with [`bic_string_free`].
 *
 * # Safety
 * `region` must be null or a live handle.
 */
char *bic_region_to_json(const struct BicRegion *region, bool include_conjectured);

/**
 * Builds and certifies the named corner construction (for example
 * `"erasure-all"`).
 *
 * # Safety
 * `corner` must be a NUL-terminated string and `out` a valid pointer; on
 * success `*out` must be released with [`bic_scheme_free`].
 */
enum BicStatus bic_scheme_build(enum BicSetup setup,
                                const char *corner,
                                uint32_t subcarriers,
                                uint32_t interfered,
                                uint32_t n,
                                uint32_t k,
                                uint8_t field_degree,
                                uint64_t seed,
                                struct BicScheme **out);

/**
 * Parses the text scheme format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BicStatus bic_scheme_parse(const char *text, struct BicScheme **out);

/**
 * The scheme in the text format, or null for a null handle.
 *
 * # Safety
 * `scheme` must be null or a live handle.
 */
char *bic_scheme_serialize(const struct BicScheme *scheme);

/**
 * Checks decodability on every receiver configuration.
 *
 * # Safety
 * `scheme` must be a live handle and `passed` a valid pointer.
 */
enum BicStatus bic_scheme_verify(const struct BicScheme *scheme, bool *passed);

/**
 * Normalized rate pair in the coordinates of `setup`.
 *
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum BicStatus bic_scheme_rate(const struct BicScheme *scheme,
                               enum BicSetup setup,
                               struct BicPoint *out);

/**
 * # Safety
 * `scheme` must be null or a handle from this library.
 */
void bic_scheme_free(struct BicScheme *scheme);

/**
 * Number of corner families achievable at `alpha = k/n`; 0 on invalid
 * arguments.
 */
size_t bic_corner_family_count(enum BicSetup setup,
                               uint32_t subcarriers,
                               uint32_t interfered,
                               uint32_t n,
                               uint32_t k);

/**
 * Sliding-window entropy check of a joint pmf given as row-major
 * probabilities (last variable fastest). `chain_out`, if non-null, must
 * hold `variables` doubles and receives the normalized window sums.
 *
 * # Safety
 * `alphabets` must point to `variables` sizes, `probs` to `probs_len`
 * doubles, and `holds` must be valid.
 */
enum BicStatus bic_sliding_window_check(const size_t *alphabets,
                                        size_t variables,
                                        const double *probs,
                                        size_t probs_len,
                                        bool *holds,
                                        double *chain_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIC_H */
