#ifndef SRV_BV_H
#define SRV_BV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SrvStatus {
  SRV_STATUS_OK = 0,
  SRV_STATUS_NULL_POINTER = 1,
  SRV_STATUS_INVALID_ARGUMENT = 2,
  SRV_STATUS_INVALID_CURVE = 3,
  SRV_STATUS_DIMENSION_MISMATCH = 4,
  SRV_STATUS_NOT_CONTINUOUS = 5,
  SRV_STATUS_ZERO_LENGTH = 6,
  SRV_STATUS_BUFFER_TOO_SMALL = 7,
  SRV_STATUS_INTERNAL = 8,
  SRV_STATUS_PANIC = 9,
} SrvStatus;

/**
 * Opaque curve handle.
 */
typedef struct SrvCurve SrvCurve;

/**
 * Opaque result of a shape-distance computation.
 */
typedef struct SrvMatch SrvMatch;

/**
 * Grid settings for [`srvbv_shape_distance`]; see [`srvbv_grid_config_default`].
 */
typedef struct SrvGridConfig {
  size_t n1;
  size_t n2;
  size_t window;
  size_t refine_rounds;
  size_t refine_factor;
  double convergence_tol;
  bool constant_speed;
} SrvGridConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *srvbv_last_error(void);

struct SrvGridConfig srvbv_grid_config_default(void);

/**
 * Builds a curve from `n` parameters and `n × dim` left values. `right` may
 * be null for a continuous curve; otherwise it holds the right values.
 *
 * # Safety
 * `ts` must point to `n` doubles, `left` (and `right` if non-null) to
 * `n * dim` doubles, `out` to writable storage for one handle.
 */
enum SrvStatus srvbv_curve_new(size_t dim,
                               size_t n,
                               const double *ts,
                               const double *left,
                               const double *right,
                               struct SrvCurve **out);

/**
 * Parses a curve file.
 *
 * # Safety
 * `json` must be a NUL-terminated string, `out` writable.
 */
enum SrvStatus srvbv_curve_from_json(const char *json, struct SrvCurve **out);

/**
 * Serialises a curve; release the string with [`srvbv_string_free`].
 *
 * # Safety
 * `curve` must be a live handle, `out` writable.
 */
enum SrvStatus srvbv_curve_to_json(const struct SrvCurve *curve, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void srvbv_string_free(char *s);

/**
 * # Safety
 * `curve` must come from this library or be null; it is invalid afterwards.
 */
void srvbv_curve_free(struct SrvCurve *curve);

/**
 * Dimension of the curve, 0 for a null handle.
 *
 * # Safety
 * `curve` must be a live handle or null.
 */
size_t srvbv_curve_dimension(const struct SrvCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle, `out` writable.
 */
enum SrvStatus srvbv_curve_length(const struct SrvCurve *curve, double *out);

/**
 * Relaxed similarity `Ŝ`.
 *
 * # Safety
 * `a`, `b` must be live handles, `out` writable.
 */
enum SrvStatus srvbv_s_hat(const struct SrvCurve *a, const struct SrvCurve *b, double *out);

/**
 * Squared relaxed distance `d̂ = len₁ + len₂ - 2Ŝ`.
 *
 * # Safety
 * `a`, `b` must be live handles, `out` writable.
 */
enum SrvStatus srvbv_d_hat(const struct SrvCurve *a, const struct SrvCurve *b, double *out);

/**
 * SRV distance of two continuous curves.
 *
 * # Safety
 * `a`, `b` must be live handles, `out` writable.
 */
enum SrvStatus srvbv_distance(const struct SrvCurve *a, const struct SrvCurve *b, double *out);

/**
 * Scale-invariant angle between the transforms of two continuous curves.
 *
 * # Safety
 * `a`, `b` must be live handles, `out` writable.
 */
enum SrvStatus srvbv_scale_invariant_distance(const struct SrvCurve *a,
                                              const struct SrvCurve *b,
                                              double *out);

/**
 * `G(c)` as a new handle; `alpha` receives `α` unless null.
 *
 * # Safety
 * `curve` must be a live handle, `out` writable, `alpha` writable or null.
 */
enum SrvStatus srvbv_g_transform(const struct SrvCurve *curve,
                                 struct SrvCurve **out,
                                 double *alpha);

/**
 * Shape distance with refinement. `cfg` may be null for the defaults.
 *
 * # Safety
 * `a`, `b` must be live handles, `cfg` readable or null, `out` writable.
 */
enum SrvStatus srvbv_shape_distance(const struct SrvCurve *a,
                                    const struct SrvCurve *b,
                                    const struct SrvGridConfig *cfg,
                                    struct SrvMatch **out);

/**
 * # Safety
 * `m` must come from this library or be null; it is invalid afterwards.
 */
void srvbv_match_free(struct SrvMatch *m);

/**
 * # Safety
 * `m` must be a live handle, `out` writable.
 */
enum SrvStatus srvbv_match_s_star(const struct SrvMatch *m, double *out);

/**
 * # Safety
 * `m` must be a live handle, `out` writable.
 */
enum SrvStatus srvbv_match_d_shape(const struct SrvMatch *m, double *out);

/**
 * Knots of `ψ₁` (`which = 1`), `ψ₂` (2), `φ₁` (3) or `φ₂` (4).
 *
 * `count` always receives the number of knots. With null `xs`/`ys` only the
 * count is reported; otherwise both arrays need room for `capacity` doubles
 * and [`SrvStatus::BufferTooSmall`] is returned if that is not enough.
 *
 * # Safety
 * `m` must be a live handle, `count` writable, `xs`/`ys` writable for
 * `capacity` doubles or both null.
 */
enum SrvStatus srvbv_match_knots(const struct SrvMatch *m,
                                 uint32_t which,
                                 double *xs,
                                 double *ys,
                                 size_t capacity,
                                 size_t *count);

/**
 * `k` correspondence pairs written as `k × 2 × dim` doubles: for each pair
 * the point on the first matched curve, then the point on the second.
 *
 * # Safety
 * `m` must be a live handle and `points` writable for `capacity` doubles.
 */
enum SrvStatus srvbv_match_correspondences(const struct SrvMatch *m,
                                           size_t k,
                                           double *points,
                                           size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRV_BV_H */
