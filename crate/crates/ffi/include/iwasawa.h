#ifndef IWASAWA_H
#define IWASAWA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Stands for an infinite valuation, i.e. a `Z_p` summand.
 */
#define IW_INFINITE UINT64_MAX

typedef enum IwStatus {
  IW_STATUS_OK = 0,
  IW_STATUS_NULL_POINTER = 1,
  IW_STATUS_INVALID_PRIME = 2,
  IW_STATUS_INVALID_INPUT = 3,
  IW_STATUS_PARSE_ERROR = 4,
  IW_STATUS_INFINITE_ORDER = 5,
  IW_STATUS_TORSION_PRESENT = 6,
  IW_STATUS_INTERNAL = 7,
} IwStatus;

/**
 * Opaque handle to a finite spectrum's homology data.
 */
typedef struct IwSpectrum IwSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Owned by the library;
 * valid until the next call on the same thread.
 */
const char *iw_last_error(void);

/**
 * Builds a torsion-free spectrum with rank `ranks[k]` in degree `degrees[k]`.
 *
 * # Safety
 * `degrees` and `ranks` must point to `len` readable elements (or be null
 * when `len` is 0); `out` must be writable.
 */
enum IwStatus iw_spectrum_new(uint64_t p,
                              const int64_t *degrees,
                              const uint64_t *ranks,
                              size_t len,
                              struct IwSpectrum **out);

/**
 * Parses a spectrum description in the CLI's JSON format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IwStatus iw_spectrum_from_json(const char *json, struct IwSpectrum **out);

/**
 * Marks `degree` as carrying p-torsion.
 *
 * # Safety
 * `spectrum` must be a live handle or null.
 */
enum IwStatus iw_spectrum_add_torsion(struct IwSpectrum *spectrum, int64_t degree);

/**
 * # Safety
 * `spectrum` must come from this library and not be freed twice. Null is ignored.
 */
void iw_spectrum_free(struct IwSpectrum *spectrum);

/**
 * # Safety
 * `spectrum` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_euler_characteristic(const struct IwSpectrum *spectrum, int64_t *out);

/**
 * # Safety
 * `spectrum` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_total_lambda(const struct IwSpectrum *spectrum, int64_t *out);

/**
 * λ of `ε_j KU^k(X)`; `k_degree` is 0 or -1, `j` is reduced mod `p - 1`.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_eigenspace_lambda(const struct IwSpectrum *spectrum,
                                   int32_t k_degree,
                                   int64_t j,
                                   uint64_t *out);

/**
 * Exponent `k` with `|π_t L_{K(1)}S^0| = p^k`, or [`IW_INFINITE`].
 *
 * # Safety
 * `out` must be writable.
 */
enum IwStatus iw_sphere_order(uint64_t p, int64_t t, uint64_t *out);

/**
 * `v_p((1+p)^n - 1)` for `n != 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum IwStatus iw_valuation_one_plus_p_pow(uint64_t p, int64_t n, uint64_t *out);

/**
 * Main conjecture records for `m_lo <= m <= m_hi` as CSV with columns
 * `m,side,lhs_val,rhs_val,in_window,match`. `all_match` is set when every
 * in-window record matches.
 *
 * # Safety
 * `spectrum` must be a live handle; `csv` and `all_match` must be writable.
 */
enum IwStatus iw_imc_report_csv(const struct IwSpectrum *spectrum,
                                int64_t m_lo,
                                int64_t m_hi,
                                char **csv,
                                bool *all_match);

/**
 * `(1/n) Σ_{j=m+1}^{m+n} (-1)^j |π_j|` as an exact fraction, e.g. `"-3/2"`.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_graded_average(const struct IwSpectrum *spectrum,
                                int64_t m,
                                uint64_t n,
                                char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void iw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IWASAWA_H */
