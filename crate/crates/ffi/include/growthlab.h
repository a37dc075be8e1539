#ifndef GROWTHLAB_H
#define GROWTHLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum GlStatus {
  GL_STATUS_OK = 0,
  GL_STATUS_NULL_POINTER = 1,
  GL_STATUS_DOMAIN = 2,
  GL_STATUS_QUADRATURE_DIVERGENCE = 3,
  GL_STATUS_CRITICALITY = 4,
  GL_STATUS_SUPERCRITICAL = 5,
  GL_STATUS_NO_CONVERGENCE = 6,
  GL_STATUS_INVALID_BOUNDARY = 7,
  GL_STATUS_BRACKET_FAILURE = 8,
  GL_STATUS_INTEGRATION_FAILURE = 9,
  GL_STATUS_NO_ZERO = 10,
  GL_STATUS_INSUFFICIENT_SAMPLES = 11,
  GL_STATUS_CONFIG = 12,
  GL_STATUS_IO = 13,
  GL_STATUS_BUFFER_TOO_SMALL = 14,
  GL_STATUS_PANIC = 15,
} GlStatus;

/**
 * Branch-point classification codes.
 */
typedef enum GlClassification {
  GL_CLASSIFICATION_ONE_REAL = 0,
  GL_CLASSIFICATION_THREE_REAL = 1,
  GL_CLASSIFICATION_DEGENERATE = 2,
} GlClassification;

/**
 * Opaque string-equation lattice state.
 */
typedef struct GlLattice GlLattice;

/**
 * Opaque conformal map.
 */
typedef struct GlMap GlMap;

/**
 * Opaque Painleve I solution.
 */
typedef struct GlPainleve GlPainleve;

/**
 * Opaque Metropolis sample.
 */
typedef struct GlSample GlSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *gl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gl_version(void);

/**
 * Critical area and radius for `V = tn z^n`.
 */
enum GlStatus gl_critical_area(size_t n, double tn_re, double tn_im, double *t_c, double *r_c);

/**
 * Elliptic droplet of area `t0` for the Gaussian potential.
 */
enum GlStatus gl_map_gaussian(double t2_re, double t2_im, double t0, struct GlMap **out);

/**
 * Droplet of area `t0` for `V = tn z^n`.
 */
enum GlStatus gl_map_monomial(size_t n, double tn_re, double tn_im, double t0, struct GlMap **out);

/**
 * Droplet of area `t0` for the logarithmic potential with real `beta`.
 */
enum GlStatus gl_map_joukowski(double alpha, double beta, double t0, struct GlMap **out);

/**
 * # Safety
 * `map` must come from a `gl_map_*` constructor and not have been freed.
 */
void gl_map_free(struct GlMap *map);

/**
 * `z(w)` for `|w| >= 1`.
 */
enum GlStatus gl_map_eval(const struct GlMap *map,
                          double w_re,
                          double w_im,
                          double *z_re,
                          double *z_im);

enum GlStatus gl_map_area(const struct GlMap *map, double *area);

/**
 * Writes `t0` and `t_1..t_kmax` into `re[0..=kmax]`, `im[0..=kmax]` (`re[0] = t0`).
 *
 * # Safety
 * `re` and `im` must each point to `kmax + 1` writable doubles.
 */
enum GlStatus gl_map_moments(const struct GlMap *map, size_t kmax, double *re, double *im);

/**
 * Number of cusps with `||w| - 1| <= tol`.
 */
enum GlStatus gl_map_cusp_count(const struct GlMap *map, double tol, size_t *count);

/**
 * Pole-free Painleve I solution on `[nu_start, nu_end]`.
 */
enum GlStatus gl_painleve_solve(double nu_start,
                                double nu_end,
                                double tol,
                                struct GlPainleve **out);

/**
 * # Safety
 * `sol` must come from `gl_painleve_solve` and not have been freed.
 */
void gl_painleve_free(struct GlPainleve *sol);

enum GlStatus gl_painleve_eval(const struct GlPainleve *sol, double nu, double *u, double *u_dot);

/**
 * Max finite-difference residual of the solution on its grid.
 */
enum GlStatus gl_painleve_residual(const struct GlPainleve *sol, double *residual);

/**
 * Zero-crossing `(nu0, u'(nu0))` of the solution.
 */
enum GlStatus gl_painleve_zero(const struct GlPainleve *sol, double *nu0, double *alpha);

/**
 * Branch points `zeta_1..3` of the spectral curve for the closed jet `(nu, u, u_dot)`.
 *
 * # Safety
 * `re` and `im` must each point to 3 writable doubles.
 */
enum GlStatus gl_branch_points(double nu,
                               double u,
                               double u_dot,
                               double *re,
                               double *im,
                               enum GlClassification *class_);

/**
 * Lax-pair compatibility residual for an arbitrary jet.
 */
enum GlStatus gl_compatibility_residual(double nu,
                                        double u,
                                        double u_dot,
                                        double u_ddot,
                                        double u_dddot,
                                        double zeta,
                                        double *residual);

/**
 * Cubic string equation on `n = 0..=n_max`.
 */
enum GlStatus gl_lattice_cubic(double t3_re,
                               double t3_im,
                               double hbar,
                               size_t n_max,
                               struct GlLattice **out);

/**
 * Gaussian recurrence on `n = 0..=n_max`.
 */
enum GlStatus gl_lattice_gaussian(double t2_re,
                                  double t2_im,
                                  double hbar,
                                  size_t n_max,
                                  struct GlLattice **out);

/**
 * # Safety
 * `state` must come from a `gl_lattice_*` constructor and not have been freed.
 */
void gl_lattice_free(struct GlLattice *state);

/**
 * Number of sites, `n_max + 1`.
 */
enum GlStatus gl_lattice_len(const struct GlLattice *state, size_t *len);

/**
 * Copies `r_n^2` into `buf`; fails with `BufferTooSmall` if `cap` is short.
 *
 * # Safety
 * `buf` must point to `cap` writable doubles.
 */
enum GlStatus gl_lattice_r_sq(const struct GlLattice *state, double *buf, size_t cap);

enum GlStatus gl_lattice_max_residual(const struct GlLattice *state, double *residual);

/**
 * Metropolis sample of `n` eigenvalues for the Gaussian potential with `t0 = n hbar`.
 */
enum GlStatus gl_sample_gaussian(double t2_re,
                                 double t2_im,
                                 size_t n,
                                 double t0,
                                 size_t sweeps,
                                 uint64_t seed,
                                 struct GlSample **out);

/**
 * # Safety
 * `sample` must come from `gl_sample_gaussian` and not have been freed.
 */
void gl_sample_free(struct GlSample *sample);

/**
 * Final configuration; `re` and `im` need room for `n` values.
 *
 * # Safety
 * `re` and `im` must each point to `cap` writable doubles.
 */
enum GlStatus gl_sample_eigenvalues(const struct GlSample *sample,
                                    double *re,
                                    double *im,
                                    size_t cap);

enum GlStatus gl_sample_stats(const struct GlSample *sample,
                              double *acceptance,
                              double *quadrupole);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROWTHLAB_H */
