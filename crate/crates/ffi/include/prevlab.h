#ifndef PREVLAB_H
#define PREVLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PrevlabStatus {
  PREVLAB_STATUS_OK = 0,
  PREVLAB_STATUS_NULL_POINTER = 1,
  PREVLAB_STATUS_INVALID_INPUT = 2,
  PREVLAB_STATUS_PARSE = 3,
  PREVLAB_STATUS_IO = 4,
  PREVLAB_STATUS_DEGENERATE = 5,
  PREVLAB_STATUS_BUFFER_TOO_SMALL = 6,
  PREVLAB_STATUS_PANIC = 7,
} PrevlabStatus;

/**
 * Polynomial map handle.
 */
typedef struct PrevlabPoly PrevlabPoly;

/**
 * Probe handle.
 */
typedef struct PrevlabProbe PrevlabProbe;

typedef struct PrevlabShyness {
  uint64_t samples;
  uint64_t holds;
  uint64_t fails;
  uint64_t undecided;
  double failure_fraction;
  double ci_lo;
  double ci_hi;
} PrevlabShyness;

typedef struct PrevlabHopf {
  double omega;
  double trace_mu_derivative;
  double lyapunov_quantity;
  /**
   * 0 supercritical, 1 subcritical, 2 degenerate-c, 3 degenerate-d,
   * 4 not a Hopf point.
   */
  int32_t classification;
} PrevlabHopf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *prevlab_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated). `*len` receives the needed size including the NUL.
 */
enum PrevlabStatus prevlab_last_error(char *buf, size_t cap, size_t *len);

/**
 * Releases a string returned by this library.
 */
void prevlab_string_free(char *s);

/**
 * Parses a `poly n m` (or `family 3 2`) block.
 */
enum PrevlabStatus prevlab_poly_parse(const char *text, struct PrevlabPoly **out);

void prevlab_poly_free(struct PrevlabPoly *p);

enum PrevlabStatus prevlab_poly_dims(const struct PrevlabPoly *p, size_t *n, size_t *m);

/**
 * Evaluates at `x[0..n]`, writing `out[0..m]`.
 */
enum PrevlabStatus prevlab_poly_eval(const struct PrevlabPoly *p,
                                     const double *x,
                                     size_t n,
                                     double *out,
                                     size_t m);

/**
 * Serializes in the text format; free the result with
 * [`prevlab_string_free`].
 */
enum PrevlabStatus prevlab_poly_to_text(const struct PrevlabPoly *p, char **out);

/**
 * Adds `c * b` to `a` in place.
 */
enum PrevlabStatus prevlab_poly_axpy(struct PrevlabPoly *a, double c, const struct PrevlabPoly *b);

enum PrevlabStatus prevlab_probe_parse(const char *text, struct PrevlabProbe **out);

/**
 * All monomials of degree at most `k` in each of the `m` components of
 * maps `R^n -> R^m`.
 */
enum PrevlabStatus prevlab_probe_polynomial(size_t n,
                                            size_t m,
                                            uint32_t k,
                                            struct PrevlabProbe **out);

void prevlab_probe_free(struct PrevlabProbe *p);

enum PrevlabStatus prevlab_probe_dim(const struct PrevlabProbe *p, size_t *dim);

/**
 * Sets the half-width of the sampling box.
 */
enum PrevlabStatus prevlab_probe_set_radius(struct PrevlabProbe *p, double r);

/**
 * Monte Carlo failure estimate of predicate `predicate` (an id such as
 * `fixed-points-hyperbolic`, default parameters) along `probe` at `base`.
 * `workers = 0` uses the default pool; the result does not depend on it.
 */
enum PrevlabStatus prevlab_shyness(const struct PrevlabPoly *base,
                                   const struct PrevlabProbe *probe,
                                   const char *predicate,
                                   uint64_t samples,
                                   uint64_t seed,
                                   size_t workers,
                                   struct PrevlabShyness *out);

/**
 * Measure of the union of binary-shift sets for levels `m+1..=n_max`.
 */
enum PrevlabStatus prevlab_binary_shift_measure(uint32_t m, uint32_t n_max, double *out);

/**
 * Classifies a candidate `(mu0, x, y)` of a `family 3 2` map.
 */
enum PrevlabStatus prevlab_hopf_classify(const struct PrevlabPoly *family,
                                         double mu0,
                                         double x,
                                         double y,
                                         struct PrevlabHopf *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PREVLAB_H */
