#ifndef COMPACT_PINV_H
#define COMPACT_PINV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpPivot {
  CP_PIVOT_SIMPLE = 0,
  CP_PIVOT_FINE = 1,
  CP_PIVOT_COARSE = 2,
} CpPivot;

// What the storage of a [`CpFactor`] currently holds.
typedef enum CpState {
  CP_STATE_RAW = 0,
  CP_STATE_CONSUMED = 1,
  CP_STATE_COL_PROJECTOR = 2,
  CP_STATE_ROW_PROJECTOR = 3,
  // A preparation failed part way; the handle can only be freed.
  CP_STATE_INVALID = 4,
} CpState;

// Result of a call.
typedef enum CpStatus {
  CP_STATUS_OK = 0,
  // Malformed input: bad dimensions, shape mismatch, mixed fields,
  // non-finite entries or a buffer of the wrong length.
  CP_STATUS_INVALID_INPUT = 2,
  // The Gram matrix lost positive definiteness.
  CP_STATUS_NUMERIC_BREAKDOWN = 3,
  // The factorization is not in the state the call requires.
  CP_STATUS_WRONG_STATE = 4,
  // A required pointer argument was NULL.
  CP_STATUS_NULL_POINTER = 5,
  // Internal panic caught at the boundary.
  CP_STATUS_PANIC = 6,
} CpStatus;

// Opaque factorization, possibly prepared as a projector.
typedef struct CpFactor CpFactor;

// Opaque dense matrix, real or complex.
typedef struct CpMatrix CpMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *cp_last_error(void);

// Creates a real `rows x cols` matrix from `rows * cols` row-major values,
// or zeros when `data` is NULL. Returns NULL on failure.
//
// # Safety
// `data` must be NULL or point to `rows * cols` readable doubles.
struct CpMatrix *cp_matrix_new_real(size_t rows, size_t cols, const double *data);

// Creates a complex `rows x cols` matrix from `2 * rows * cols` interleaved
// values, or zeros when `data` is NULL. Returns NULL on failure.
//
// # Safety
// `data` must be NULL or point to `2 * rows * cols` readable doubles.
struct CpMatrix *cp_matrix_new_complex(size_t rows, size_t cols, const double *data);

// # Safety
// `m` must be NULL or a handle from this library not yet freed.
void cp_matrix_free(struct CpMatrix *m);

// # Safety
// `m` must be a live handle.
size_t cp_matrix_rows(const struct CpMatrix *m);

// # Safety
// `m` must be a live handle.
size_t cp_matrix_cols(const struct CpMatrix *m);

// # Safety
// `m` must be a live handle.
bool cp_matrix_is_complex(const struct CpMatrix *m);

// Copies the entries into `out`, which must hold exactly `rows * cols`
// doubles (twice that for complex).
//
// # Safety
// `m` must be a live handle and `out` must point to `len` writable doubles.
enum CpStatus cp_matrix_copy_out(const struct CpMatrix *m, double *out, size_t len);

// Factors a copy of `a`. On success `*out` receives a new handle; rank zero
// is not a failure. `eps` is used only by the simple policy.
//
// # Safety
// `a` must be a live handle and `out` a writable pointer.
enum CpStatus cp_factorize(const struct CpMatrix *a,
                           enum CpPivot pivot,
                           double eps,
                           struct CpFactor **out);

// # Safety
// `f` must be NULL or a handle from this library not yet freed.
void cp_factor_free(struct CpFactor *f);

// # Safety
// `f` must be a live handle.
size_t cp_factor_rank(const struct CpFactor *f);

// # Safety
// `f` must be a live handle.
size_t cp_factor_rows(const struct CpFactor *f);

// # Safety
// `f` must be a live handle.
size_t cp_factor_cols(const struct CpFactor *f);

// # Safety
// `f` must be a live handle.
enum CpState cp_factor_state(const struct CpFactor *f);

// Copies the row permutation (`rows` entries): row `i` of `PA` is row
// `out[i]` of `A`.
//
// # Safety
// `f` must be a live handle and `out` must point to `len` writable values.
enum CpStatus cp_factor_permutation(const struct CpFactor *f, size_t *out, size_t len);

// Copies the `rank` pivot columns.
//
// # Safety
// `f` must be a live handle and `out` must point to `len` writable values.
enum CpStatus cp_factor_pivot_columns(const struct CpFactor *f, size_t *out, size_t len);

// Computes `g = A+ b`. `b` (rows x p) is overwritten with intermediates and
// `g` must be cols x p. The factorization is consumed: later calls on it
// report `CP_STATUS_WRONG_STATE`.
//
// # Safety
// All three arguments must be live, distinct handles.
enum CpStatus cp_pinv_apply(struct CpFactor *f, struct CpMatrix *b, struct CpMatrix *g);

// Turns a raw factorization into a reusable `A+A` projector.
//
// # Safety
// `f` must be a live handle.
enum CpStatus cp_prepare_col_projector(struct CpFactor *f);

// Turns a raw factorization into a reusable `AA+` projector.
//
// # Safety
// `f` must be a live handle.
enum CpStatus cp_prepare_row_projector(struct CpFactor *f);

// Applies a prepared projector to `b` (dim x p). With `g` NULL the result
// overwrites `b`; otherwise it goes to `g` (dim x p) and `b` holds
// intermediates.
//
// # Safety
// `f` and `b` must be live handles; `g` must be NULL or a live handle
// distinct from `b`.
enum CpStatus cp_projector_apply(const struct CpFactor *f, struct CpMatrix *b, struct CpMatrix *g);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMPACT_PINV_H */
