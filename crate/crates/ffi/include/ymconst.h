#ifndef YMCONST_H
#define YMCONST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum YmStatus {
  YM_STATUS_OK = 0,
  YM_STATUS_NULL_POINTER = 1,
  YM_STATUS_INVALID_DIMENSION = 2,
  YM_STATUS_NON_FINITE = 3,
  YM_STATUS_INDEX_OUT_OF_RANGE = 4,
  YM_STATUS_NOT_AVAILABLE = 5,
  YM_STATUS_INVALID_TOLERANCE = 6,
  YM_STATUS_INTERNAL = 7,
} YmStatus;

/**
 * Classification of a current by its singular values.
 */
typedef enum YmCase {
  YM_CASE_ZERO_CURRENT = 0,
  YM_CASE_RANK1_NO_SOLUTION = 1,
  YM_CASE_RANK2_UNIQUE = 2,
  YM_CASE_ALL_EQUAL = 3,
  YM_CASE_TWO_LARGE_EQUAL = 4,
  YM_CASE_TWO_SMALL_EQUAL = 5,
  YM_CASE_ALL_DISTINCT = 6,
  YM_CASE_ONE_DIMENSIONAL = 7,
} YmCase;

/**
 * Shape of the solution set.
 */
typedef enum YmKind {
  YM_KIND_EMPTY = 0,
  YM_KIND_FINITE = 1,
  YM_KIND_FAMILY = 2,
} YmKind;

/**
 * Opaque solution report.
 */
typedef struct YmReport YmReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ym_status_message(enum YmStatus status);

/**
 * Solves for the `n × 3` current `j` with the default tolerances.
 *
 * # Safety
 * `j` must point to `n * 3` readable doubles and `out` to writable storage
 * for one pointer.
 */
enum YmStatus ym_solve(size_t n, const double *j, struct YmReport **out);

/**
 * As [`ym_solve`] with explicit zero and tie thresholds.
 *
 * # Safety
 * Same as [`ym_solve`].
 */
enum YmStatus ym_solve_with_tolerances(size_t n,
                                       const double *j,
                                       double zero_tol,
                                       double tie_tol,
                                       struct YmReport **out);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must come from [`ym_solve`] and not have been freed already.
 */
void ym_report_free(struct YmReport *report);

/**
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_dimension(const struct YmReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_case(const struct YmReport *report, enum YmCase *out);

/**
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_kind(const struct YmReport *report, enum YmKind *out);

/**
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_rank(const struct YmReport *report, size_t *out);

/**
 * Writes the three singular values, non-increasing.
 *
 * # Safety
 * `report` must be a live report, `out` must hold 3 doubles.
 */
enum YmStatus ym_report_singular_values(const struct YmReport *report, double *out);

/**
 * The pairing invariant `K`; `NotAvailable` outside the two-solution
 * cases.
 *
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_k(const struct YmReport *report, double *out);

/**
 * Number of listed solutions. A family lists its zero representative.
 *
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_solution_count(const struct YmReport *report, size_t *out);

/**
 * Copies solution `index` as an `n × 3` row-major matrix.
 *
 * # Safety
 * `report` must be a live report, `out` must hold `n * 3` doubles.
 */
enum YmStatus ym_report_potential(const struct YmReport *report, size_t index, double *out);

/**
 * `λ` with `F_{μν}F^{μν} = λ·1` for solution `index`.
 *
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_f2coeff(const struct YmReport *report, size_t index, double *out);

/**
 * Max-norm residual of solution `index`.
 *
 * # Safety
 * `report` must be a live report, `out` writable.
 */
enum YmStatus ym_report_residual(const struct YmReport *report, size_t index, double *out);

/**
 * Writes `L(A) − J` as an `n × 3` row-major matrix.
 *
 * # Safety
 * `a` and `j` must hold `n * 3` doubles, `out` must hold `n * 3` doubles.
 */
enum YmStatus ym_residual(size_t n, const double *a, const double *j, double *out);

/**
 * Field strength of `a`: `comps` receives `F^{μν}_c` at index
 * `(μ n + ν) 3 + c` and may be null; `f2coeff` receives `λ`.
 *
 * # Safety
 * `a` must hold `n * 3` doubles, `comps` (if non-null) `n * n * 3`.
 */
enum YmStatus ym_strength(size_t n, const double *a, double *comps, double *f2coeff);

/**
 * Singular values, rank and case of the current `j`.
 *
 * # Safety
 * `j` must hold `n * 3` doubles, `singular_values` 3 doubles.
 */
enum YmStatus ym_classify(size_t n,
                          const double *j,
                          double *singular_values,
                          size_t *rank,
                          enum YmCase *case_label);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YMCONST_H */
