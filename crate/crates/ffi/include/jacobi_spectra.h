#ifndef JACOBI_SPECTRA_H
#define JACOBI_SPECTRA_H

#include <stddef.h>
#include <stdint.h>

// Result code of every call.
typedef enum JsStatus {
  JS_STATUS_OK = 0,
  JS_STATUS_NULL_POINTER = 1,
  JS_STATUS_INVALID_UTF8 = 2,
  JS_STATUS_PARSE = 3,
  JS_STATUS_PRECONDITION = 4,
  JS_STATUS_NUMERICAL = 5,
  JS_STATUS_IO = 6,
  JS_STATUS_PANIC = 7,
} JsStatus;

// Opaque coefficient model.
typedef struct JsModel JsModel;

// Complex number as `re + i im`.
typedef struct JsComplex {
  double re;
  double im;
} JsComplex;

// Row-major 2×2 complex matrix.
typedef struct JsMatrix {
  struct JsComplex m11;
  struct JsComplex m12;
  struct JsComplex m21;
  struct JsComplex m22;
} JsMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call on the same thread.
const char *js_last_error(void);

// Parses a JSON model file body into a new handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum JsStatus js_model_from_json(const char *json, struct JsModel **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `m` must come from `js_model_from_json` and not be used afterwards.
void js_model_free(struct JsModel *m);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void js_string_free(char *s);

// Period `N` of the model.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum JsStatus js_model_period(const struct JsModel *m, size_t *out);

// Coefficients `(a_n, b_n)`.
//
// # Safety
// `m` must be a live handle and `a`, `b` writable.
enum JsStatus js_coeff(const struct JsModel *m, size_t n, struct JsComplex *a, struct JsComplex *b);

// `X_n(z) = B_{n+period-1} ··· B_n` for `n ≥ 1`.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum JsStatus js_n_step(const struct JsModel *m,
                        size_t n,
                        size_t period,
                        struct JsComplex z,
                        struct JsMatrix *out);

// `(tr X)² − 4 det X`.
//
// # Safety
// `x` must be readable and `out` writable.
enum JsStatus js_discriminant(const struct JsMatrix *x, struct JsComplex *out);

// Λ scan of the limit family at `offset` along the real grid
// `t0:t1:step`, as JSON.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum JsStatus js_lambda_scan(const struct JsModel *m,
                             size_t offset,
                             double t0,
                             double t1,
                             double step,
                             double tol,
                             char **out);

// Proper/improper classification from Λ scans on `t0:t1:step`, as JSON.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum JsStatus js_classify(const struct JsModel *m,
                          double t0,
                          double t1,
                          double step,
                          double tol,
                          size_t n_max,
                          char **out);

// Summary of the Turán trace at `z` with `α = (1, 0)`, as JSON. A null
// `gamma` means the scale is estimated from the coefficients.
//
// # Safety
// `m` must be a live handle, `gamma` null or readable, `out` writable.
enum JsStatus js_turan(const struct JsModel *m,
                       size_t offset,
                       struct JsComplex z,
                       const struct JsComplex *gamma,
                       size_t n_max,
                       char **out);

// Generalised eigenvector bound-ratio report at `z`, as JSON.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum JsStatus js_bounds(const struct JsModel *m,
                        size_t offset,
                        struct JsComplex z,
                        size_t n_max,
                        char **out);

// Eigenvalues of the `dim × dim` truncation inside a box, as JSON. A zero
// `budget` selects the default.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum JsStatus js_finite_section(const struct JsModel *m,
                                size_t dim,
                                double re0,
                                double re1,
                                double im0,
                                double im1,
                                double tol,
                                size_t budget,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JACOBI_SPECTRA_H */
