#ifndef ERGODIC_DIRAC_H
#define ERGODIC_DIRAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Summability verdict codes.
 */
#define ED_VERDICT_PLATEAU 0

#define ED_VERDICT_GROWING 1

#define ED_VERDICT_INCONCLUSIVE 2

typedef enum EdStatus {
  ED_STATUS_OK = 0,
  ED_STATUS_NULL_POINTER = 1,
  ED_STATUS_INVALID_ARGUMENT = 2,
  ED_STATUS_DIMENSION_MISMATCH = 3,
  ED_STATUS_RADIUS_EXCEEDS_TRUNCATION = 4,
  ED_STATUS_EMPTY_INTERIOR = 5,
  ED_STATUS_SIGN_MISMATCH = 6,
  ED_STATUS_RELATION_FAILED = 7,
  ED_STATUS_MULTIPLICITY_BOUND = 8,
  ED_STATUS_NO_CONVERGENCE = 9,
  ED_STATUS_PARSE = 10,
  ED_STATUS_INVALID_UTF8 = 11,
  ED_STATUS_OUT_OF_RANGE = 12,
  ED_STATUS_PANIC = 13,
} EdStatus;

typedef struct EdClifford EdClifford;

typedef struct EdDirac EdDirac;

typedef struct EdElement EdElement;

typedef struct EdSpectrum EdSpectrum;

typedef struct EdTheta EdTheta;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *ed_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ed_string_free(char *s);

/**
 * Builds `Cl(n)` with the given branch (`+1` or `-1`).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum EdStatus ed_clifford_new(size_t n, int branch, struct EdClifford **out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`ed_clifford_new`], not yet freed.
 */
void ed_clifford_free(struct EdClifford *h);

/**
 * Spinor dimension `2^m`, or 0 for a NULL handle.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t ed_clifford_dim(const struct EdClifford *h);

/**
 * Writes `ε_J`, `ε_D` as `±1`; `ε_γ` is `±1` for even n and 0 for odd n.
 *
 * # Safety
 * `h` must be a live handle; the output pointers must be writable.
 */
enum EdStatus ed_clifford_signs(const struct EdClifford *h, int *eps_j, int *eps_d, int *eps_gamma);

/**
 * # Safety
 * `h` must be a live handle; `out` receives a string for [`ed_string_free`].
 */
enum EdStatus ed_clifford_to_json(const struct EdClifford *h, char **out);

/**
 * `n × n` antisymmetric matrix from `n²` row-major entries.
 *
 * # Safety
 * `entries` must point to `n * n` readable doubles; `out` must be writable.
 */
enum EdStatus ed_theta_new(size_t n, const double *entries, struct EdTheta **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EdStatus ed_theta_from_json(const char *json, struct EdTheta **out);

/**
 * # Safety
 * `h` must be NULL or a live handle.
 */
void ed_theta_free(struct EdTheta *h);

/**
 * Hex fingerprint of the entries.
 *
 * # Safety
 * `h` must be a live handle; `out` receives a string for [`ed_string_free`].
 */
enum EdStatus ed_theta_fingerprint(const struct EdTheta *h, char **out);

/**
 * The zero element of the rank-`n` torus.
 *
 * # Safety
 * `out` must be writable.
 */
enum EdStatus ed_element_new(size_t n, struct EdElement **out);

/**
 * # Safety
 * `h` must be NULL or a live handle.
 */
void ed_element_free(struct EdElement *h);

/**
 * Adds `(re + i·im)·U^p`.
 *
 * # Safety
 * `h` must be a live handle; `p` must point to `len` readable integers.
 */
enum EdStatus ed_element_add_term(struct EdElement *h,
                                  const int64_t *p,
                                  size_t len,
                                  double re,
                                  double im);

/**
 * Coefficient of `U^p`.
 *
 * # Safety
 * `h` must be a live handle; `p` must point to `len` integers; `re`, `im` writable.
 */
enum EdStatus ed_element_coeff(const struct EdElement *h,
                               const int64_t *p,
                               size_t len,
                               double *re,
                               double *im);

/**
 * `a·b` in the algebra deformed by `theta`.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum EdStatus ed_element_multiply(const struct EdElement *a,
                                  const struct EdElement *b,
                                  const struct EdTheta *theta,
                                  struct EdElement **out);

/**
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum EdStatus ed_element_adjoint(const struct EdElement *a,
                                 const struct EdTheta *theta,
                                 struct EdElement **out);

/**
 * # Safety
 * `h` must be a live handle; `out` receives a string for [`ed_string_free`].
 */
enum EdStatus ed_element_to_json(const struct EdElement *h, char **out);

/**
 * The cyclic 2-cocycle on the two-dimensional torus.
 *
 * # Safety
 * All handles must be live; `re`, `im` must be writable.
 */
enum EdStatus ed_cyclic_cocycle_2d(const struct EdElement *a0,
                                   const struct EdElement *a1,
                                   const struct EdElement *a2,
                                   const struct EdTheta *theta,
                                   double *re,
                                   double *im);

/**
 * `D = Σ_{j ∈ active} ∂_j ⊗ F_j` on the box `|p_j| ≤ radius`; `active`
 * holds 0-based directions in increasing order.
 *
 * # Safety
 * `cliff` must be live; `active` must point to `active_len` readable entries.
 */
enum EdStatus ed_dirac_new(const struct EdClifford *cliff,
                           size_t n_alg,
                           int64_t radius,
                           const size_t *active,
                           size_t active_len,
                           struct EdDirac **out);

/**
 * # Safety
 * `h` must be NULL or a live handle.
 */
void ed_dirac_free(struct EdDirac *h);

/**
 * Dimension of `ℋ₀ ⊗ S`, or 0 for a NULL handle.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t ed_dirac_dim(const struct EdDirac *h);

/**
 * # Safety
 * `h` must be live; `out` must be writable.
 */
enum EdStatus ed_dirac_spectrum(const struct EdDirac *h, struct EdSpectrum **out);

/**
 * # Safety
 * `h` must be NULL or a live handle.
 */
void ed_spectrum_free(struct EdSpectrum *h);

/**
 * Number of distinct eigenvalues, or 0 for a NULL handle.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t ed_spectrum_len(const struct EdSpectrum *h);

/**
 * The `index`-th distinct eigenvalue (ascending) and its multiplicity.
 *
 * # Safety
 * `h` must be live; `value` and `multiplicity` must be writable.
 */
enum EdStatus ed_spectrum_get(const struct EdSpectrum *h,
                              size_t index,
                              double *value,
                              size_t *multiplicity);

/**
 * Total multiplicity of `|λ| < 1e-9`, or 0 for a NULL handle.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t ed_spectrum_kernel_multiplicity(const struct EdSpectrum *h);

/**
 * CSV with columns `value,multiplicity`.
 *
 * # Safety
 * `h` must be live; `out` receives a string for [`ed_string_free`].
 */
enum EdStatus ed_spectrum_to_csv(const struct EdSpectrum *h, char **out);

/**
 * Dixmier partial-sum estimate: writes the tail spread of `r_k` and one of
 * the `ED_VERDICT_*` codes.
 *
 * # Safety
 * `h` must be live; `tail_spread` and `verdict` must be writable.
 */
enum EdStatus ed_spectrum_summability(const struct EdSpectrum *h,
                                      uint32_t exponent,
                                      double *tail_spread,
                                      int *verdict);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ERGODIC_DIRAC_H */
