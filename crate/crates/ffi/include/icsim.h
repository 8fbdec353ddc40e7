#ifndef ICSIM_H
#define ICSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IcsimStatus {
  ICSIM_STATUS_OK = 0,
  ICSIM_STATUS_NULL_POINTER = 1,
  ICSIM_STATUS_INVALID_ARGUMENT = 2,
  ICSIM_STATUS_DIMENSION_MISMATCH = 3,
  ICSIM_STATUS_CONFIG = 4,
  ICSIM_STATUS_BUDGET_EXCEEDED = 5,
  ICSIM_STATUS_IO = 6,
  ICSIM_STATUS_PANIC = 7,
  ICSIM_STATUS_INTERNAL = 8,
} IcsimStatus;

/**
 * Outcome tag written by `icsim_problem_draw`.
 */
typedef enum IcsimOutcome {
  ICSIM_OUTCOME_Z0 = 0,
  ICSIM_OUTCOME_Z1 = 1,
  ICSIM_OUTCOME_Z2 = 2,
  ICSIM_OUTCOME_NOISE = 3,
} IcsimOutcome;

/**
 * Values accepted by `icsim_problem_new`.
 */
typedef enum IcsimInstanceKind {
  ICSIM_INSTANCE_KIND_CHAIN = 0,
  ICSIM_INSTANCE_KIND_CHAIN_TWO_POINT = 1,
  ICSIM_INSTANCE_KIND_CLIPPED_CHAIN = 2,
  ICSIM_INSTANCE_KIND_QUADRATIC_PLUS = 3,
  ICSIM_INSTANCE_KIND_QUADRATIC_MINUS = 4,
  ICSIM_INSTANCE_KIND_NOISY_QUADRATIC = 5,
} IcsimInstanceKind;

/**
 * Values accepted by `icsim_run`.
 */
typedef enum IcsimAlgorithm {
  ICSIM_ALGORITHM_MINIBATCH_ACSA = 0,
  ICSIM_ALGORITHM_SINGLE_MACHINE_ACSA = 1,
  ICSIM_ALGORITHM_LOCAL_SGD = 2,
  ICSIM_ALGORITHM_MINIBATCH_SGD = 3,
} IcsimAlgorithm;

/**
 * Opaque instance handle.
 */
typedef struct IcsimProblem IcsimProblem;

/**
 * Opaque run result handle.
 */
typedef struct IcsimRunResult IcsimRunResult;

/**
 * Problem class and communication budget.
 */
typedef struct IcsimParams {
  double h;
  double b;
  double sigma;
  size_t m;
  size_t k;
  size_t r;
} IcsimParams;

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *icsim_last_error(void);

/**
 * Builds an instance of `kind` (an `IcsimInstanceKind` value) with all
 * parameters derived from `params`.
 *
 * # Safety
 * `params` must point to a valid `IcsimParams`; `out` must be writable.
 */
enum IcsimStatus icsim_problem_new(int32_t kind,
                                   const struct IcsimParams *params,
                                   struct IcsimProblem **out);

/**
 * Builds an instance from a JSON instance descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string; other pointers as for
 * `icsim_problem_new`.
 */
enum IcsimStatus icsim_problem_from_json(const char *json,
                                         const struct IcsimParams *params,
                                         struct IcsimProblem **out);

/**
 * # Safety
 * `problem` must be null or a handle from this library not yet freed.
 */
void icsim_problem_free(struct IcsimProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle; `out` writable.
 */
enum IcsimStatus icsim_problem_dim(const struct IcsimProblem *problem, size_t *out);

/**
 * Optimal value `F*`.
 *
 * # Safety
 * `problem` must be a live handle; `out` writable.
 */
enum IcsimStatus icsim_problem_f_star(const struct IcsimProblem *problem, double *out);

/**
 * Exact value and gradient at `x`. `grad` may be null.
 *
 * # Safety
 * `x` must hold `len` doubles, `grad` (if not null) room for `len`.
 */
enum IcsimStatus icsim_problem_eval(const struct IcsimProblem *problem,
                                    const double *x,
                                    size_t len,
                                    double *value,
                                    double *grad);

/**
 * One stochastic oracle draw, a pure function of `x` and the key
 * `(seed, machine, round, k)`. `value` receives NaN when the oracle is
 * first-order only.
 *
 * # Safety
 * `x` and `grad` must hold `len` doubles; `value` and `outcome` writable.
 */
enum IcsimStatus icsim_problem_draw(const struct IcsimProblem *problem,
                                    const double *x,
                                    size_t len,
                                    uint64_t seed,
                                    uint64_t machine,
                                    uint64_t round,
                                    uint64_t k,
                                    double *grad,
                                    double *value,
                                    enum IcsimOutcome *outcome);

/**
 * Runs `algorithm` (an `IcsimAlgorithm` value) for `params.r` rounds.
 *
 * # Safety
 * `problem` must be a live handle, `params` valid, `out` writable.
 */
enum IcsimStatus icsim_run(const struct IcsimProblem *problem,
                           int32_t algorithm,
                           const struct IcsimParams *params,
                           uint64_t seed,
                           struct IcsimRunResult **out);

/**
 * # Safety
 * `result` must be null or a handle from this library not yet freed.
 */
void icsim_run_result_free(struct IcsimRunResult *result);

/**
 * Number of rounds recorded.
 *
 * # Safety
 * `result` must be a live handle; `out` writable.
 */
enum IcsimStatus icsim_run_result_rounds(const struct IcsimRunResult *result, size_t *out);

/**
 * Copies the per-round suboptimality into `buf`, which must have room for
 * exactly the number of rounds.
 *
 * # Safety
 * `buf` must hold `len` doubles.
 */
enum IcsimStatus icsim_run_result_suboptimality(const struct IcsimRunResult *result,
                                                double *buf,
                                                size_t len);

/**
 * Largest progress reached by any query.
 *
 * # Safety
 * `result` must be a live handle; `out` writable.
 */
enum IcsimStatus icsim_run_result_max_prog(const struct IcsimRunResult *result, size_t *out);

/**
 * Runs the verification suite for a JSON experiment config. `out_json`
 * receives one report per line (free with `icsim_string_free`), and
 * `all_passed` 1 or 0.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; outputs writable.
 */
enum IcsimStatus icsim_verify(const char *config_json, char **out_json, int32_t *all_passed);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void icsim_string_free(char *s);

/**
 * Ambient dimension needed for the rotated lower-bound instance; saturates
 * at `UINT64_MAX`.
 *
 * # Safety
 * `params` must be valid; `out` writable.
 */
enum IcsimStatus icsim_required_dimension(const struct IcsimParams *params, uint64_t *out);

/**
 * Analytic cap on the progress of any zero-respecting method.
 *
 * # Safety
 * `params` must be valid; `out` writable.
 */
enum IcsimStatus icsim_progress_budget(const struct IcsimParams *params, double p, size_t *out);

#endif  /* ICSIM_H */
