#ifndef HARDYLAB_H
#define HARDYLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum HardyStatus {
  HARDY_STATUS_OK = 0,
  HARDY_STATUS_REJECTED_INPUT = 1,
  HARDY_STATUS_DIVERGENT_SERIES = 2,
  HARDY_STATUS_ZERO_DENOMINATOR = 3,
  HARDY_STATUS_NON_FINITE = 4,
  HARDY_STATUS_SEARCH_FAILED = 5,
  HARDY_STATUS_PARSE_ERROR = 6,
  HARDY_STATUS_IO_ERROR = 7,
  HARDY_STATUS_NULL_POINTER = 8,
  HARDY_STATUS_PANIC = 9,
} HardyStatus;

/**
 * Opaque non-increasing sequence `λ` with its partial sums.
 */
typedef struct HardyLambda HardyLambda;

/**
 * Opaque weight sequence `b`.
 */
typedef struct HardyWeights HardyWeights;

typedef struct HardyCondition {
  double u_prime;
  size_t argmax_n;
  double tail_error;
  size_t n_max;
  /**
   * True when the scanned maximum is the supremum over all n.
   */
  bool exact;
} HardyCondition;

typedef struct HardyBounds {
  double u_prime;
  double lower;
  double upper_new;
  double upper_bge;
  double u_double_prime;
} HardyBounds;

typedef struct HardyEstimate {
  double estimate;
  size_t n_trunc;
  size_t iterations;
  size_t witness_len;
} HardyEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last error on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *hardy_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hardy_version(void);

/**
 * Validates `values[0..len]` as a non-increasing sequence with
 * `values[0] > 0` and stores a new handle in `*out`.
 */
enum HardyStatus hardy_lambda_new(const double *values, size_t len, struct HardyLambda **out);

/**
 * The unit sequence `λ ≡ 1`.
 */
enum HardyStatus hardy_lambda_unit(struct HardyLambda **out);

/**
 * Stored length of a sequence; 0 for NULL.
 */
size_t hardy_lambda_len(const struct HardyLambda *lambda);

void hardy_lambda_free(struct HardyLambda *lambda);

enum HardyStatus hardy_weights_explicit(const double *values,
                                        size_t len,
                                        struct HardyWeights **out);

/**
 * `b_n = n^alpha`.
 */
enum HardyStatus hardy_weights_power(double alpha, struct HardyWeights **out);

/**
 * `b_n = r^n`, `0 < r < 1`.
 */
enum HardyStatus hardy_weights_geometric(double r, struct HardyWeights **out);

void hardy_weights_free(struct HardyWeights *weights);

/**
 * Parses a weight-file document (`{"b": …, "lambda": …}`) into two new
 * handles.
 */
enum HardyStatus hardy_parse_weights_json(const char *json,
                                          struct HardyWeights **out_weights,
                                          struct HardyLambda **out_lambda);

enum HardyStatus hardy_c_refined(const struct HardyLambda *lambda, double p, size_t n, double *out);

enum HardyStatus hardy_c_effective(const struct HardyLambda *lambda,
                                   double p,
                                   size_t n,
                                   double *out);

/**
 * Partial sum of `Σ_{k≥n} b_k / Λ_k^p` and a bound on the omitted tail.
 */
enum HardyStatus hardy_tail_sum(const struct HardyWeights *weights,
                                const struct HardyLambda *lambda,
                                double p,
                                size_t n,
                                double *out_value,
                                double *out_error);

enum HardyStatus hardy_condition_ratio(const struct HardyWeights *weights,
                                       const struct HardyLambda *lambda,
                                       double p,
                                       size_t n,
                                       double *out);

enum HardyStatus hardy_best_u_prime(const struct HardyWeights *weights,
                                    const struct HardyLambda *lambda,
                                    double p,
                                    size_t n_max,
                                    struct HardyCondition *out);

enum HardyStatus hardy_u_bounds(double u_prime, double p, struct HardyBounds *out);

/**
 * Hardy ratio of the non-increasing trial vector `x[0..len]`.
 */
enum HardyStatus hardy_ratio(const struct HardyWeights *weights,
                             const struct HardyLambda *lambda,
                             double p,
                             const double *x,
                             size_t len,
                             double *out);

enum HardyStatus hardy_f_n(const struct HardyLambda *lambda,
                           double p,
                           const double *x,
                           size_t len,
                           double *out);

/**
 * Projects `v[0..len]` onto the non-increasing non-negative cone, writing
 * the result to `out[0..len]` (which may alias `v`).
 */
enum HardyStatus hardy_isotonic_project(const double *v, size_t len, double *out);

/**
 * Best-constant lower bound. When `witness` is non-NULL and
 * `witness_cap >= out->witness_len`, the witness vector is copied there.
 */
enum HardyStatus hardy_estimate_best_constant(const struct HardyWeights *weights,
                                              const struct HardyLambda *lambda,
                                              double p,
                                              size_t n_trunc,
                                              size_t restarts,
                                              uint64_t seed,
                                              struct HardyEstimate *out,
                                              double *witness,
                                              size_t witness_cap);

/**
 * Runs the full analysis on a weight-file document and returns the JSON
 * report in `*out_json` (release with [`hardy_string_free`]). A report
 * that stopped early is still returned, with its `incomplete` field set.
 */
enum HardyStatus hardy_analyze_json(const char *weights_json,
                                    double p,
                                    size_t n_max,
                                    size_t n_trunc,
                                    size_t restarts,
                                    uint64_t seed,
                                    size_t trials,
                                    char **out_json);

/**
 * Releases a string returned by this library.
 */
void hardy_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDYLAB_H */
