#ifndef CABELLO_H
#define CABELLO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CabelloNpaLevel {
  CABELLO_NPA_LEVEL_ONE = 0,
  CABELLO_NPA_LEVEL_ONE_AB = 1,
  CABELLO_NPA_LEVEL_TWO = 2,
  CABELLO_NPA_LEVEL_THREE = 3,
} CabelloNpaLevel;

typedef enum CabelloStatus {
  CABELLO_STATUS_OK = 0,
  CABELLO_STATUS_NULL_POINTER = 1,
  CABELLO_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation finished but did not meet its convergence criterion;
   * the out-parameter still holds the last iterate.
   */
  CABELLO_STATUS_NOT_CONVERGED = 3,
  CABELLO_STATUS_NUMERICAL_FAILURE = 4,
  CABELLO_STATUS_PANIC = 5,
} CabelloStatus;

/**
 * Opaque optimization result.
 */
typedef struct CabelloOptResult CabelloOptResult;

/**
 * Opaque list of sweep records.
 */
typedef struct CabelloSweep CabelloSweep;

typedef struct CabelloOptOptions {
  size_t starts;
  uint64_t seed;
  double tol;
  size_t max_evals;
} CabelloOptOptions;

typedef struct CabelloSdpOptions {
  double rho;
  double tol;
  size_t max_iter;
} CabelloSdpOptions;

typedef struct CabelloConstrainedParams {
  double c;
  double delta;
  double alpha;
  double beta;
  double phi;
  double xi;
} CabelloConstrainedParams;

/**
 * Scalar fields of an optimization result.
 */
typedef struct CabelloOptSummary {
  double score;
  double e10;
  double e01;
  double alpha;
  double beta;
  bool converged;
} CabelloOptSummary;

typedef struct CabelloNpaResult {
  double value;
  double primal_residual;
  double dual_residual;
  size_t iterations;
} CabelloNpaResult;

typedef struct CabelloSweepRecord {
  double eps;
  double local_bound;
  double quantum_lower;
  double quantum_upper;
  enum CabelloNpaLevel level;
  /**
   * 0 ok, 1 iteration cap reached, 2 failed.
   */
  uint32_t status;
} CabelloSweepRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cabello_version(void);

/**
 * Message of the last failed call on this thread, or null. Free with
 * [`cabello_string_free`].
 */
char *cabello_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library that has not been freed.
 */
void cabello_string_free(char *s);

struct CabelloOptOptions cabello_opt_options_default(void);

struct CabelloSdpOptions cabello_sdp_options_default(void);

/**
 * Local hidden-variable maximum of `p − q` with both constraints at most `eps`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum CabelloStatus cabello_local_bound(double eps, double *out);

/**
 * Closed-form score of the constrained two-qubit family.
 *
 * # Safety
 * `params` must point to a valid struct and `out` must be valid for a write.
 */
enum CabelloStatus cabello_closed_form_score(const struct CabelloConstrainedParams *params,
                                             double *out);

/**
 * Multistart search over the constrained family. `opts` may be null for defaults.
 *
 * # Safety
 * `opts` must be null or valid; `out` must be valid for a write.
 */
enum CabelloStatus cabello_optimize_ideal(const struct CabelloOptOptions *opts,
                                          struct CabelloOptResult **out);

/**
 * Best ansatz score with both constraint probabilities at most `eps`.
 *
 * # Safety
 * As for [`cabello_optimize_ideal`].
 */
enum CabelloStatus cabello_optimize_nonideal(double eps,
                                             const struct CabelloOptOptions *opts,
                                             struct CabelloOptResult **out);

/**
 * Best Hardy probability; the summary's score is `p` since `q = 0`.
 *
 * # Safety
 * As for [`cabello_optimize_ideal`].
 */
enum CabelloStatus cabello_optimize_hardy(const struct CabelloOptOptions *opts,
                                          struct CabelloOptResult **out);

/**
 * # Safety
 * `h` must be a live handle and `out` valid for a write.
 */
enum CabelloStatus cabello_opt_result_summary(const struct CabelloOptResult *h,
                                              struct CabelloOptSummary *out);

/**
 * Full result as JSON, or null on a null handle. Free with [`cabello_string_free`].
 *
 * # Safety
 * `h` must be null or a live handle.
 */
char *cabello_opt_result_to_json(const struct CabelloOptResult *h);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void cabello_opt_result_free(struct CabelloOptResult *h);

/**
 * NPA upper bound. Returns `NotConverged` with `out` filled when the solver
 * stops at its iteration cap. `opts` may be null for defaults.
 *
 * # Safety
 * `opts` must be null or valid; `out` must be valid for a write.
 */
enum CabelloStatus cabello_npa_upper_bound(enum CabelloNpaLevel level,
                                           double eps,
                                           const struct CabelloSdpOptions *opts,
                                           struct CabelloNpaResult *out);

/**
 * Sweep over `len` ascending values in `grid`. Null option pointers select defaults;
 * `threads` = 0 runs serially.
 *
 * # Safety
 * `grid` must be valid for `len` reads; the option pointers must be null or valid;
 * `out` must be valid for a write.
 */
enum CabelloStatus cabello_sweep(const double *grid,
                                 size_t len,
                                 enum CabelloNpaLevel level,
                                 const struct CabelloOptOptions *opt,
                                 const struct CabelloSdpOptions *sdp,
                                 size_t threads,
                                 struct CabelloSweep **out);

/**
 * Number of records, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t cabello_sweep_len(const struct CabelloSweep *h);

/**
 * # Safety
 * `h` must be a live handle and `out` valid for a write.
 */
enum CabelloStatus cabello_sweep_record(const struct CabelloSweep *h,
                                        size_t index,
                                        struct CabelloSweepRecord *out);

/**
 * Records as CSV text. Free with [`cabello_string_free`].
 *
 * # Safety
 * `h` must be null or a live handle.
 */
char *cabello_sweep_to_csv(const struct CabelloSweep *h);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void cabello_sweep_free(struct CabelloSweep *h);

/**
 * Extraction fidelity for a diagonal direct sum of optimal blocks with the
 * given `n` weights and measurement phases.
 *
 * # Safety
 * `weights` must be valid for `n` reads and `out` valid for a write.
 */
enum CabelloStatus cabello_selftest_fidelity(const double *weights,
                                             size_t n,
                                             double phi,
                                             double xi,
                                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CABELLO_H */
