#ifndef UPG_H
#define UPG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UpgStatus {
  UPG_STATUS_OK = 0,
  UPG_STATUS_NULL_ARGUMENT = 1,
  UPG_STATUS_INVALID_UTF8 = 2,
  UPG_STATUS_PARSE_ERROR = 3,
  UPG_STATUS_INVALID_CT = 4,
  UPG_STATUS_INVALID_ORDER = 5,
  UPG_STATUS_COMPUTATION_FAILED = 6,
  UPG_STATUS_PANIC = 7,
} UpgStatus;

/**
 * Opaque handle to a validated CT.
 */
typedef struct UpgCt UpgCt;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates CT text, storing a new handle in `out`.
 *
 * # Safety
 * `text_ptr` is a NUL-terminated string and `out` is writable.
 */
enum UpgStatus upg_ct_load(const char *text_ptr, struct UpgCt **out);

/**
 * # Safety
 * `h` is null or a handle from [`upg_ct_load`] that has not been freed.
 */
void upg_ct_free(struct UpgCt *h);

/**
 * # Safety
 * `h` is a live handle and `out` is writable.
 */
enum UpgStatus upg_ct_rank(const struct UpgCt *h, size_t *out);

/**
 * Length of `f^k_#(E)` for the edge named `edge`.
 *
 * # Safety
 * `h` is a live handle, `edge` a NUL-terminated string, `out` writable.
 */
enum UpgStatus upg_iterate_length(const struct UpgCt *h, const char *edge, size_t k, size_t *out);

/**
 * Invariant report as text or JSON. `chain` may be null for the default order.
 * The string in `out` must be released with [`upg_string_free`].
 *
 * # Safety
 * `h` is a live handle, `chain` null or NUL-terminated, `out` writable.
 */
enum UpgStatus upg_report(const struct UpgCt *h,
                          const char *chain,
                          size_t depth,
                          bool json,
                          char **out);

/**
 * Writes "indistinguishable", "distinguished at <component>" or
 * "undetermined: <reason>" to `out`; free it with [`upg_string_free`].
 *
 * # Safety
 * `a`, `b` are live handles, chains null or NUL-terminated, `out` writable.
 */
enum UpgStatus upg_compare(const struct UpgCt *a,
                           const struct UpgCt *b,
                           const char *chain_a,
                           const char *chain_b,
                           char **out);

/**
 * Sets `out` to whether `theta` conjugates the automorphism of `phi` to that of `psi`.
 *
 * # Safety
 * `phi`, `psi` are live handles, `theta` NUL-terminated, `out` writable.
 */
enum UpgStatus upg_verify_conjugator(const struct UpgCt *phi,
                                     const struct UpgCt *psi,
                                     const char *theta,
                                     bool *out);

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *upg_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void upg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UPG_H */
