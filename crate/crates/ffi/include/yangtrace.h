#ifndef YANGTRACE_H
#define YANGTRACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum YtGKind {
  YT_G_KIND_STANDARD = 0,
  YT_G_KIND_TILDE = 1,
  YT_G_KIND_BAR = 2,
} YtGKind;

typedef enum YtStatus {
  YT_STATUS_OK = 0,
  YT_STATUS_NULL_POINTER = 1,
  YT_STATUS_INVALID_ARGUMENT = 2,
  YT_STATUS_POLE = 3,
  YT_STATUS_DOMAIN = 4,
  YT_STATUS_NO_CONVERGENCE = 5,
  YT_STATUS_CONTOUR = 6,
  YT_STATUS_DISAGREEMENT = 7,
  YT_STATUS_UNKNOWN_FORMULA = 8,
  YT_STATUS_PANIC = 9,
} YtStatus;

/**
 * Deformation parameters and precision settings.
 */
typedef struct YtContext YtContext;

typedef struct YtComplex {
  double re;
  double im;
} YtComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *yt_last_error(void);

/**
 * Creates a context with ħ > 0, complex γ and default precision.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum YtStatus yt_context_new(double hbar, double gamma_re, double gamma_im, struct YtContext **out);

/**
 * # Safety
 * `ctx` must come from `yt_context_new` and not be used afterwards. Null is
 * ignored.
 */
void yt_context_free(struct YtContext *ctx);

/**
 * Sets the relative tolerance of the adaptive quadratures.
 *
 * # Safety
 * `ctx` must be a live context.
 */
enum YtStatus yt_context_set_rel_tol(struct YtContext *ctx, double rel_tol);

/**
 * Γ(z).
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum YtStatus yt_gamma(struct YtComplex z, struct YtComplex *out);

/**
 * G, G̃ or Ḡ at z.
 *
 * # Safety
 * `ctx` must be a live context and `out` valid for writing.
 */
enum YtStatus yt_g_function(const struct YtContext *ctx,
                            enum YtGKind kind,
                            struct YtComplex z,
                            struct YtComplex *out);

/**
 * Scalar factor of the R-matrix.
 *
 * # Safety
 * `ctx` must be a live context and `out` valid for writing.
 */
enum YtStatus yt_r_scalar(const struct YtContext *ctx, struct YtComplex z, struct YtComplex *out);

/**
 * Full 4×4 R-matrix, row-major into `out[16]`.
 *
 * # Safety
 * `ctx` must be a live context and `out` valid for writing 16 values.
 */
enum YtStatus yt_r_matrix(const struct YtContext *ctx, struct YtComplex z, struct YtComplex *out);

/**
 * Trace of a product of type II (rapidities `beta`, components `eps`) and
 * type I (spectral parameters `zeta`, components `nu`) vertex operators,
 * components given as +1 or −1.
 *
 * # Safety
 * Each array must hold its stated number of elements; `out` must be valid
 * for writing.
 */
enum YtStatus yt_trace(const struct YtContext *ctx,
                       const struct YtComplex *beta,
                       const int *eps,
                       size_t n_type_ii,
                       const struct YtComplex *zeta,
                       const int *nu,
                       size_t n_type_i,
                       struct YtComplex *out);

/**
 * ∫ Γ(a+s)Γ(b+s)Γ(c−s)Γ(d−s) ds/2πi along a separating vertical line.
 *
 * # Safety
 * `ctx` must be a live context and `out` valid for writing.
 */
enum YtStatus yt_mellin_barnes(const struct YtContext *ctx,
                               struct YtComplex a,
                               struct YtComplex b,
                               struct YtComplex c,
                               struct YtComplex d,
                               struct YtComplex *out);

/**
 * Evaluates a registered formula as the command line does. `params_json` is
 * a JSON object of strings or numbers, or null for none. On success
 * `*out_json` receives the result record, to be released with
 * `yt_string_free`. A failing check is still `YT_STATUS_OK`; read "pass".
 *
 * # Safety
 * String arguments must be NUL-terminated; `out_json` valid for writing.
 */
enum YtStatus yt_eval_json(const char *formula, const char *params_json, char **out_json);

/**
 * # Safety
 * `s` must come from `yt_eval_json` and not be used afterwards. Null is
 * ignored.
 */
void yt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YANGTRACE_H */
