#ifndef QOHNO_H
#define QOHNO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QohnoStatus {
  QOHNO_STATUS_OK = 0,
  QOHNO_STATUS_NULL_POINTER = 1,
  QOHNO_STATUS_INVALID_UTF8 = 2,
  QOHNO_STATUS_INVALID_ARGUMENT = 3,
  QOHNO_STATUS_INVALID_PARAMS = 4,
  QOHNO_STATUS_NOT_ADMISSIBLE = 5,
  QOHNO_STATUS_NOT_CONVERGENT = 6,
  QOHNO_STATUS_BUDGET_EXCEEDED = 7,
  QOHNO_STATUS_EPSILON_TOO_LARGE = 8,
  QOHNO_STATUS_PANIC = 9,
} QohnoStatus;

/**
 * A truncated λ-polynomial in the letters x and y.
 */
typedef struct QohnoExpr QohnoExpr;

/**
 * Parameter set (q, ξ, η) together with precision and budget settings.
 */
typedef struct QohnoParams QohnoParams;

/**
 * A computed value with its rigorous absolute error budget.
 */
typedef struct QohnoReal QohnoReal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or "" after a success.
 * The pointer stays valid until the next qohno call on the same thread.
 */
const char *qohno_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string produced by this library and not yet freed.
 */
void qohno_string_free(char *s);

/**
 * Creates a parameter set from rational strings such as "1/2".
 *
 * # Safety
 * The string arguments must be null or NUL-terminated; `out` must be writable.
 */
enum QohnoStatus qohno_params_new(const char *q,
                                  const char *xi,
                                  const char *eta,
                                  struct QohnoParams **out);

/**
 * # Safety
 * `p` must be null or a live handle from [`qohno_params_new`].
 */
void qohno_params_free(struct QohnoParams *p);

/**
 * # Safety
 * `p` must be a live params handle.
 */
enum QohnoStatus qohno_params_set_prec_bits(struct QohnoParams *p, size_t bits);

/**
 * # Safety
 * `p` must be a live params handle.
 */
enum QohnoStatus qohno_params_set_max_terms(struct QohnoParams *p, size_t cap);

/**
 * # Safety
 * `p` must be a live params handle.
 */
enum QohnoStatus qohno_params_set_target_abs_err(struct QohnoParams *p, double err);

/**
 * ζ_q(k) for an index written like "2,1,3".
 *
 * # Safety
 * `p` must be a live params handle, `index` NUL-terminated, `out` writable.
 */
enum QohnoStatus qohno_zeta(const struct QohnoParams *p, const char *index, struct QohnoReal **out);

/**
 * The generating function O(k).
 *
 * # Safety
 * Same contract as [`qohno_zeta`].
 */
enum QohnoStatus qohno_big_o(const struct QohnoParams *p,
                             const char *index,
                             struct QohnoReal **out);

/**
 * The Ohno sum O_{e1,e2}(k).
 *
 * # Safety
 * Same contract as [`qohno_zeta`].
 */
enum QohnoStatus qohno_ohno_sum(const struct QohnoParams *p,
                                const char *index,
                                uint32_t e1,
                                uint32_t e2,
                                struct QohnoReal **out);

/**
 * The connected sum Z(k;l). Either index may be the empty string.
 *
 * # Safety
 * Same contract as [`qohno_zeta`].
 */
enum QohnoStatus qohno_connected_sum(const struct QohnoParams *p,
                                     const char *k,
                                     const char *l,
                                     struct QohnoReal **out);

/**
 * O(y w x) for a λ-polynomial w. Validates ε on the parameter set first.
 *
 * # Safety
 * `p` and `w` must be live handles; `out` writable.
 */
enum QohnoStatus qohno_big_o_word(struct QohnoParams *p,
                                  const struct QohnoExpr *w,
                                  struct QohnoReal **out);

/**
 * # Safety
 * `r` must be a live value handle.
 */
double qohno_real_to_f64(const struct QohnoReal *r);

/**
 * Absolute error budget of a computed value.
 *
 * # Safety
 * `r` must be a live value handle.
 */
double qohno_real_error_bound(const struct QohnoReal *r);

/**
 * Full-precision decimal rendering; free with [`qohno_string_free`].
 *
 * # Safety
 * `r` must be a live value handle; `out` writable.
 */
enum QohnoStatus qohno_real_to_string(const struct QohnoReal *r, char **out);

/**
 * # Safety
 * `r` must be null or a live value handle.
 */
void qohno_real_free(struct QohnoReal *r);

/**
 * Parses an expression such as "x R + 1/2 y L", truncated at λ-degree `order`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` writable.
 */
enum QohnoStatus qohno_expr_parse(const char *text, size_t order, struct QohnoExpr **out);

/**
 * The anti-automorphism τ applied to `w`.
 *
 * # Safety
 * `w` must be a live expression handle; `out` writable.
 */
enum QohnoStatus qohno_expr_tau(const struct QohnoExpr *w, struct QohnoExpr **out);

/**
 * # Safety
 * `w` must be a live expression handle; `out` writable.
 */
enum QohnoStatus qohno_expr_to_string(const struct QohnoExpr *w, char **out);

/**
 * # Safety
 * `w` must be null or a live expression handle.
 */
void qohno_expr_free(struct QohnoExpr *w);

/**
 * The dual of an admissible index, written like "1,2".
 *
 * # Safety
 * `index` must be NUL-terminated; `out` writable.
 */
enum QohnoStatus qohno_dual(const char *index, char **out);

/**
 * Runs a named suite and returns its JSON report. `passed` receives whether
 * every case passed. `max_weight` of 0 and `seed` of 0 select the defaults.
 *
 * # Safety
 * `p` must be a live params handle, `name` NUL-terminated, `json` and
 * `passed` writable.
 */
enum QohnoStatus qohno_run_suite(const struct QohnoParams *p,
                                 const char *name,
                                 size_t lambda_order,
                                 uint32_t max_weight,
                                 uint64_t seed,
                                 char **json,
                                 bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QOHNO_H */
