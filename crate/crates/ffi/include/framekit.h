#ifndef FRAMEKIT_H
#define FRAMEKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Why a frame was found not scalable.
 */
typedef enum FkReason {
  FK_REASON_NONE = 0,
  FK_REASON_CONTAINS_ORTHONORMAL_PAIR = 1,
  FK_REASON_RATIO_INCONSISTENT = 2,
  FK_REASON_IDENTITY_VIOLATED = 3,
  FK_REASON_WEIGHT_OUT_OF_RANGE = 4,
  FK_REASON_SCALED_FRAME_NOT_PARSEVAL = 5,
} FkReason;

typedef enum FkStatus {
  FK_STATUS_OK = 0,
  FK_STATUS_ZERO_COLUMN = 1,
  FK_STATUS_INVALID_SHAPE = 2,
  FK_STATUS_NON_FINITE = 3,
  FK_STATUS_SINGULAR_BASIS = 4,
  FK_STATUS_SHAPE_MISMATCH = 5,
  FK_STATUS_SEED_TOO_LONG = 6,
  FK_STATUS_ROWS_NOT_ORTHONORMAL = 7,
  FK_STATUS_UNSUPPORTED_DIMENSION = 8,
  FK_STATUS_DEGENERATE_PAIR = 9,
  FK_STATUS_NOT_UNIT_NORM = 10,
  FK_STATUS_TRIVIAL_FRAME = 11,
  FK_STATUS_WRONG_COUNT = 12,
  FK_STATUS_NOT_PARSEVAL = 13,
  FK_STATUS_WRONG_DIMENSION = 14,
  FK_STATUS_NULL_POINTER = 100,
  FK_STATUS_BUFFER_TOO_SMALL = 101,
  FK_STATUS_PANIC = 102,
} FkStatus;

/**
 * Opaque frame handle.
 */
typedef struct FkFrame FkFrame;

typedef struct FkTightness {
  double lower_bound;
  double upper_bound;
  double residual;
  double parseval_deviation;
  double trace_residual;
  bool is_tight;
  bool is_parseval;
} FkTightness;

typedef struct FkVerdict {
  bool scalable;
  enum FkReason reason;
  /**
   * NaN when the pipeline stopped before computing it.
   */
  double max_identity_residual;
  /**
   * NaN when the pipeline stopped before computing it.
   */
  double ratio_spread;
} FkVerdict;

typedef struct FkAudit {
  uintptr_t checks;
  uintptr_t failures;
  uintptr_t skipped;
} FkAudit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies `n * count` column-major entries into a new frame.
 *
 * # Safety
 * `data` must point to `n * count` readable doubles; `out` must be writable.
 */
enum FkStatus fk_frame_new(uintptr_t n, uintptr_t count, const double *data, struct FkFrame **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `frame` must come from this library and not be freed twice.
 */
void fk_frame_free(struct FkFrame *frame);

/**
 * Ambient dimension `n`; 0 for a null handle.
 *
 * # Safety
 * `frame` must be null or a live handle.
 */
uintptr_t fk_frame_dim(const struct FkFrame *frame);

/**
 * Number of vectors `N`; 0 for a null handle.
 *
 * # Safety
 * `frame` must be null or a live handle.
 */
uintptr_t fk_frame_count(const struct FkFrame *frame);

/**
 * Writes the column-major entries into `out` (`len >= n * N`).
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FkStatus fk_frame_copy_data(const struct FkFrame *frame, double *out, uintptr_t len);

/**
 * Triangular Parseval `(n+1)`-frame whose last vector is the seed.
 *
 * # Safety
 * `seed` must point to `n` readable doubles; `out` must be writable.
 */
enum FkStatus fk_construct(const double *seed, uintptr_t n, struct FkFrame **out);

/**
 * Deterministic random Parseval frame of `count` vectors in ℝⁿ.
 *
 * # Safety
 * `out` must be writable.
 */
enum FkStatus fk_random_parseval(uintptr_t n, uintptr_t count, uint64_t seed, struct FkFrame **out);

/**
 * # Safety
 * `frame` must be a live handle; `out` must be writable.
 */
enum FkStatus fk_verify(const struct FkFrame *frame, double tol, struct FkTightness *out);

/**
 * Scalability decision for a unit-norm `(n+1)`-frame. When scalable and
 * `weights` is non-null, the `N` lengths are written to it.
 *
 * # Safety
 * `weights` must be null or point to `weights_len` writable doubles.
 */
enum FkStatus fk_decide_scalability(const struct FkFrame *frame,
                                    double tol,
                                    struct FkVerdict *out,
                                    double *weights,
                                    uintptr_t weights_len);

/**
 * Least-squares oracle; `weights` receives the lengths when scalable.
 *
 * # Safety
 * `weights` must be null or point to `weights_len` writable doubles.
 */
enum FkStatus fk_oracle_scale(const struct FkFrame *frame,
                              bool *scalable,
                              double *weights,
                              uintptr_t weights_len);

/**
 * Canonical representative up to rotation and sign flips.
 *
 * # Safety
 * `frame` must be a live handle; `out` must be writable.
 */
enum FkStatus fk_canonicalize(const struct FkFrame *frame, struct FkFrame **out);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum FkStatus fk_equivalent(const struct FkFrame *a,
                            const struct FkFrame *b,
                            double tol,
                            bool *out);

/**
 * Check counts from the identity audit.
 *
 * # Safety
 * `frame` must be a live handle; `out` must be writable.
 */
enum FkStatus fk_audit(const struct FkFrame *frame, double tol, struct FkAudit *out);

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *fk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAMEKIT_H */
