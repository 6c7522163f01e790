#ifndef CYCLIC_EF_H
#define CYCLIC_EF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CefStatus {
  CEF_STATUS_OK = 0,
  // A factorization failed verification or a cross-check disagreed.
  CEF_STATUS_VERIFY_FAILED = 1,
  // Arguments out of range.
  CEF_STATUS_DOMAIN = 2,
  // Input text could not be parsed.
  CEF_STATUS_PARSE = 3,
  // A construction broke one of its own invariants.
  CEF_STATUS_INTERNAL = 4,
  CEF_STATUS_NULL_POINTER = 5,
  CEF_STATUS_PANIC = 6,
} CefStatus;

// A nonnegative factorization of a cyclic-polytope slack matrix.
typedef struct CefFactorization CefFactorization;

// An extended formulation of a cyclic polytope.
typedef struct CefFormulation CefFormulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *cef_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void cef_string_free(char *s);

// Factorization of the slack matrix of `P^d_n` on `[1, n]`.
//
// # Safety
// `out` must be a valid pointer.
enum CefStatus cef_factorize(size_t n, size_t d, struct CefFactorization **out);

// # Safety
// `f` must be null or a handle from this library.
void cef_factorization_free(struct CefFactorization *f);

// Rank, or 0 for a null handle.
//
// # Safety
// `f` must be null or a live handle.
size_t cef_factorization_rank(const struct CefFactorization *f);

// Number of rows (vertices).
//
// # Safety
// `f` must be null or a live handle.
size_t cef_factorization_rows(const struct CefFactorization *f);

// Number of columns (facets).
//
// # Safety
// `f` must be null or a live handle.
size_t cef_factorization_cols(const struct CefFactorization *f);

// Checks every entry against the slack matrix. Returns `CEF_STATUS_OK` when it
// reconstructs exactly and `CEF_STATUS_VERIFY_FAILED` with the first offending
// entry in the error message otherwise.
//
// # Safety
// `f` must be a live handle.
enum CefStatus cef_factorization_verify(const struct CefFactorization *f);

// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum CefStatus cef_factorization_to_json(const struct CefFactorization *f, char **out);

// Parses a factorization. Shapes are checked; entries are not, so call
// [`cef_factorization_verify`] before trusting it.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CefStatus cef_factorization_from_json(const char *json, struct CefFactorization **out);

// Facets of `P^d_n` as JSON.
//
// # Safety
// `out` must be a valid pointer.
enum CefStatus cef_facets_json(size_t n, size_t d, char **out);

// Extended formulation of `P^d_n`: the reflection construction for
// `d = 2`, the factorization formulation otherwise.
//
// # Safety
// `out` must be a valid pointer.
enum CefStatus cef_ef_build(size_t n, size_t d, struct CefFormulation **out);

// Number of inequalities, or 0 for a null handle.
//
// # Safety
// `ef` must be null or a live handle.
size_t cef_ef_size(const struct CefFormulation *ef);

// LP-style listing of the formulation.
//
// # Safety
// `ef` must be a live handle and `out` a valid pointer.
enum CefStatus cef_ef_text(const struct CefFormulation *ef, char **out);

// # Safety
// `ef` must be null or a handle from this library.
void cef_ef_free(struct CefFormulation *ef);

// Minimizes `c[0] + c[1] t + ... + c[len-1] t^(len-1)` over the integers
// `1..=n` with one exact LP and checks it against direct evaluation.
// `report` receives the JSON report; `t_star` the smallest minimizer.
//
// # Safety
// `coeffs` must point to `len` integers; `t_star` and `report` must be
// valid pointers (`report` may be null to skip the report).
enum CefStatus cef_minimize_poly(const int64_t *coeffs,
                                 size_t len,
                                 size_t n,
                                 int64_t *t_star,
                                 char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLIC_EF_H */
