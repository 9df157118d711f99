#ifndef SCALAR_SPECTRAL_H
#define SCALAR_SPECTRAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SspStatus {
  SSP_STATUS_OK = 0,
  SSP_STATUS_NULL_POINTER = 1,
  SSP_STATUS_INVALID_UTF8 = 2,
  SSP_STATUS_INVALID_SPEC = 3,
  SSP_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The operator is not of scalar type, or a precondition such as `0 ∈ σ(A)` fails.
   */
  SSP_STATUS_NOT_APPLICABLE = 5,
  /**
   * A certificate could not be produced at the configured truncation.
   */
  SSP_STATUS_INCONCLUSIVE = 6,
  SSP_STATUS_PANIC = 7,
} SspStatus;

typedef enum SspVerdict {
  SSP_VERDICT_RESOLVENT = 0,
  SSP_VERDICT_POINT = 1,
  SSP_VERDICT_CONTINUOUS = 2,
  SSP_VERDICT_RESIDUAL = 3,
} SspVerdict;

/**
 * Opaque operator handle.
 */
typedef struct SspOperator SspOperator;

/**
 * Flat view of a spectral-gap check; infinite norms are `INFINITY`.
 */
typedef struct SspGapSummary {
  bool isolated;
  bool range_closed;
  bool predicates_agree;
  bool is_eigenvalue;
  double gap_radius;
  double inf_nonzero_modulus;
  double restriction_inverse_norm;
} SspGapSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Owned by the library.
 */
const char *ssp_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ssp_string_free(char *s);

/**
 * Builds an operator from its JSON spec.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_op` must be writable.
 */
enum SspStatus ssp_operator_from_json(const char *json, struct SspOperator **out_op);

/**
 * # Safety
 * `op` must be NULL or a handle from [`ssp_operator_from_json`], not yet freed.
 */
void ssp_operator_free(struct SspOperator *op);

/**
 * Exact value of `λ(n)` for an expression in `n`.
 *
 * # Safety
 * `expr` must be a NUL-terminated string; `re` and `im` must be writable.
 */
enum SspStatus ssp_lambda_eval(const char *expr, uint64_t n, double *re, double *im);

/**
 * Classifies `λ = re + i·im`, looking `truncation` indices into a diagonal tail.
 *
 * # Safety
 * `op` must be a live handle; `verdict` must be writable.
 */
enum SspStatus ssp_classify_point(const struct SspOperator *op,
                                  double re,
                                  double im,
                                  uint64_t truncation,
                                  enum SspVerdict *verdict);

/**
 * Isolation of `0` against closedness of the range, with `samples` random
 * vectors drawn from `seed` for the proof identity. `report_json` may be NULL.
 *
 * # Safety
 * `op` must be a live handle; `summary` must be writable.
 */
enum SspStatus ssp_gap_check(const struct SspOperator *op,
                             uint32_t samples,
                             uint64_t seed,
                             struct SspGapSummary *summary,
                             char **report_json);

/**
 * `F(A)x` for a function descriptor such as `reciprocal_cutoff(0.5)` and a
 * JSON vector (`[..]` dense or `{"k": ..}` sparse). The result is
 * `{"value": {..}, "converged_at": n}`.
 *
 * # Safety
 * `op` must be a live handle, the strings NUL-terminated and `result_json` writable.
 */
enum SspStatus ssp_apply_function(const struct SspOperator *op,
                                  const char *function,
                                  const char *vector_json,
                                  char **result_json);

/**
 * Solves `(A + E({0}))y = x`. The result is
 * `{"y": {..}, "residual": r, "inverse_norm_bound": b}`.
 *
 * # Safety
 * `op` must be a live handle, `vector_json` NUL-terminated and `result_json` writable.
 */
enum SspStatus ssp_reducible_inverse(const struct SspOperator *op,
                                     const char *vector_json,
                                     char **result_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCALAR_SPECTRAL_H */
