#ifndef AFFINOR_RANK_H
#define AFFINOR_RANK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum ArStatus {
  AR_STATUS_OK = 0,
  AR_STATUS_NULL_POINTER = 1,
  AR_STATUS_INVALID_UTF8 = 2,
  AR_STATUS_PARSE = 3,
  AR_STATUS_INVALID_DATA = 4,
  AR_STATUS_PANIC = 5,
} ArStatus;

// Opaque handle to a validated algebra given by structure constants.
typedef struct ArAlgebra ArAlgebra;

// Opaque handle to a validated affinor basis.
typedef struct ArBasis ArBasis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *ar_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ar_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or was returned through an `out_json` parameter and not yet freed.
void ar_string_free(char *s);

// Parses and validates an affinor basis from JSON.
//
// # Safety
// `json` is a NUL-terminated string; `out` is valid for one pointer write.
enum ArStatus ar_basis_from_json(const char *json, struct ArBasis **out);

// Releases a basis handle. Null is ignored.
//
// # Safety
// `basis` is null or a live handle from [`ar_basis_from_json`].
void ar_basis_free(struct ArBasis *basis);

// Writes the ambient dimension `m` and the basis size `n`.
//
// # Safety
// `basis` is a live handle; `m` and `n` are valid for writes.
enum ArStatus ar_basis_dims(const struct ArBasis *basis, uintptr_t *m, uintptr_t *n);

// Searches for a weak rank witness. `trials == 0` keeps the default budget.
// Writes the outcome as JSON.
//
// # Safety
// `basis` is a live handle; `out_json` is valid for one pointer write.
enum ArStatus ar_weak_rank(const struct ArBasis *basis,
                           uint64_t seed,
                           uintptr_t trials,
                           char **out_json);

// Certifies the generic rank. `trials == 0` keeps the default budget.
// Writes the outcome as JSON.
//
// # Safety
// `basis` is a live handle; `out_json` is valid for one pointer write.
enum ArStatus ar_generic_rank(const struct ArBasis *basis,
                              uint64_t seed,
                              uintptr_t trials,
                              char **out_json);

// Re-checks a rank certificate given as JSON. Writes 1 to `valid` when every
// check passes, else 0, and the audit as JSON to `out_json` when non-null.
//
// # Safety
// `json` is a NUL-terminated string; `valid` is valid for a write;
// `out_json` is null or valid for one pointer write.
enum ArStatus ar_verify_certificate(const char *json, int32_t *valid, char **out_json);

// Parses structure constants `{"n", "C"}` from JSON.
//
// # Safety
// `json` is a NUL-terminated string; `out` is valid for one pointer write.
enum ArStatus ar_algebra_from_json(const char *json, struct ArAlgebra **out);

// Releases an algebra handle. Null is ignored.
//
// # Safety
// `algebra` is null or a live handle from [`ar_algebra_from_json`].
void ar_algebra_free(struct ArAlgebra *algebra);

// Decides whether the algebra is Frobenius and cross-checks the answer
// against the rank of its structure-matrix module. Writes the consistency
// report as JSON.
//
// # Safety
// `algebra` is a live handle; `out_json` is valid for one pointer write.
enum ArStatus ar_frobenius(const struct ArAlgebra *algebra,
                           uint64_t seed,
                           uintptr_t trials,
                           char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AFFINOR_RANK_H */
