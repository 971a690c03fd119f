#ifndef MPS_PARENT_H
#define MPS_PARENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum MpspStatus {
  MPSP_STATUS_OK = 0,
  MPSP_STATUS_NULL_POINTER = 1,
  MPSP_STATUS_INVALID_UTF8 = 2,
  MPSP_STATUS_DOMAIN = 3,
  MPSP_STATUS_RESOURCE = 4,
  MPSP_STATUS_PRECONDITION = 5,
  MPSP_STATUS_CHARGE_INCONSISTENT = 6,
  MPSP_STATUS_CONSISTENCY = 7,
  MPSP_STATUS_NUMERICAL = 8,
  MPSP_STATUS_CONFIG = 9,
  MPSP_STATUS_IO = 10,
  MPSP_STATUS_JSON = 11,
  MPSP_STATUS_BUFFER_TOO_SMALL = 12,
  MPSP_STATUS_PANIC = 13,
} MpspStatus;

/**
 * Opaque MPS tensor handle.
 */
typedef struct MpspTensor MpspTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *mpsp_last_error_message(void);

/**
 * Sets the process-wide memory budget in bytes for dense allocations.
 */
enum MpspStatus mpsp_set_memory_budget(uint64_t bytes);

/**
 * Gaussian random tensor with `d` physical and `bond` virtual dimensions.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum MpspStatus mpsp_random_mps(uintptr_t d,
                                uintptr_t bond,
                                uint64_t seed,
                                struct MpspTensor **out);

/**
 * The spin-1 AKLT tensor.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum MpspStatus mpsp_aklt_tensor(struct MpspTensor **out);

/**
 * Generalized AKLT tensor for a spec such as `"j=3/2 J=2 Q=0"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` valid for writing.
 */
enum MpspStatus mpsp_generalized_aklt(const char *spec, struct MpspTensor **out);

/**
 * Tensor from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writing.
 */
enum MpspStatus mpsp_mps_from_json(const char *json, struct MpspTensor **out);

/**
 * JSON form of a tensor; free the result with [`mpsp_string_free`].
 *
 * # Safety
 * `t` must be a live handle and `out` valid for writing.
 */
enum MpspStatus mpsp_mps_to_json(const struct MpspTensor *t, char **out);

/**
 * Physical and bond dimension of a tensor.
 *
 * # Safety
 * `t` must be a live handle; the output pointers must be valid for writing.
 */
enum MpspStatus mpsp_mps_dims(const struct MpspTensor *t, uintptr_t *d, uintptr_t *bond);

/**
 * Releases a tensor handle. Null is ignored.
 *
 * # Safety
 * `t` must come from this library and not be used afterwards.
 */
void mpsp_mps_free(struct MpspTensor *t);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void mpsp_string_free(char *s);

/**
 * Smallest `ℓ <= ell_max` at which the blocking map is injective, or 0.
 *
 * # Safety
 * `t` must be a live handle and `out` valid for writing.
 */
enum MpspStatus mpsp_injectivity_length(const struct MpspTensor *t,
                                        uintptr_t ell_max,
                                        double rank_tol,
                                        uintptr_t *out);

/**
 * Dimension of the span of the MPS states on `ell` sites.
 *
 * # Safety
 * `t` must be a live handle and `out` valid for writing.
 */
enum MpspStatus mpsp_mps_space_dim(const struct MpspTensor *t,
                                   uintptr_t ell,
                                   double rank_tol,
                                   uintptr_t *out);

/**
 * Intersection dimensions for `L = ell, ..., l` written to `dims`, which
 * holds `capacity` entries. `written` receives the number of lengths; if
 * the buffer is too small it still receives the required count.
 *
 * # Safety
 * `t` must be a live handle, `dims` valid for `capacity` writes and
 * `written` valid for writing.
 */
enum MpspStatus mpsp_intersection_dims(const struct MpspTensor *t,
                                       uintptr_t ell,
                                       uintptr_t l,
                                       double rank_tol,
                                       double angle_tol,
                                       uintptr_t *dims,
                                       uintptr_t capacity,
                                       uintptr_t *written);

/**
 * Full intersection report as JSON; free with [`mpsp_string_free`].
 *
 * # Safety
 * `t` must be a live handle and `out` valid for writing.
 */
enum MpspStatus mpsp_intersection_report(const struct MpspTensor *t,
                                         uintptr_t ell,
                                         uintptr_t l,
                                         double rank_tol,
                                         double angle_tol,
                                         char **out);

/**
 * Whether the intersection on `l` sites has dimension `D²`.
 *
 * # Safety
 * `t` must be a live handle and `out` valid for writing.
 */
enum MpspStatus mpsp_int_holds(const struct MpspTensor *t,
                               uintptr_t ell,
                               uintptr_t l,
                               double rank_tol,
                               double angle_tol,
                               bool *out);

/**
 * Determinant witness: `is_zero` tells whether it vanishes; otherwise
 * `log_abs` receives its natural logarithm (NaN when zero).
 *
 * # Safety
 * `t` must be a live handle; the output pointers must be valid for writing.
 */
enum MpspStatus mpsp_f_det(const struct MpspTensor *t,
                           uintptr_t ell,
                           uintptr_t l,
                           double rank_tol,
                           bool *is_zero,
                           double *log_abs);

/**
 * Parameter-counting lower bound on the intersection dimension.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum MpspStatus mpsp_dim_lower_bound(uintptr_t d,
                                     uintptr_t bond,
                                     uintptr_t ell,
                                     uintptr_t l,
                                     int64_t *out);

/**
 * Clebsch-Gordan coefficient; all arguments are twice the spin values.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum MpspStatus mpsp_cg(int32_t j1,
                        int32_t m1,
                        int32_t j2,
                        int32_t m2,
                        int32_t j,
                        int32_t m,
                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPS_PARENT_H */
