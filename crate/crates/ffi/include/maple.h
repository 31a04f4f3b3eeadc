#ifndef MAPLE_H
#define MAPLE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MapleStatus {
  MAPLE_STATUS_OK = 0,
  MAPLE_STATUS_NULL_ARGUMENT = 1,
  MAPLE_STATUS_INVALID_UTF8 = 2,
  MAPLE_STATUS_PARSE = 3,
  MAPLE_STATUS_INVALID_CONFIG = 4,
  MAPLE_STATUS_LATTICE = 5,
  MAPLE_STATUS_POOL_MISMATCH = 6,
  MAPLE_STATUS_TOO_LARGE = 7,
  MAPLE_STATUS_NO_SOLUTION = 8,
  MAPLE_STATUS_BUFFER_TOO_SMALL = 9,
  MAPLE_STATUS_INTERNAL = 10,
} MapleStatus;

// Set of kernel directions usable by `maple_solve`.
typedef struct MaplePool MaplePool;

// Validated problem instance.
typedef struct MapleProblem MapleProblem;

// Outcome of `maple_solve`.
typedef struct MapleReport MapleReport;

// Extraction parameters; obtain defaults from `maple_extraction_params_default`.
typedef struct MapleExtractionParams {
  uint64_t num_starts;
  uint64_t epochs;
  double lambda1;
  double lambda2;
  double step_size;
  uint64_t seed;
  uint64_t max_pool_size;
} MapleExtractionParams;

// Solve parameters; obtain defaults from `maple_solve_params_default`.
typedef struct MapleSolveParams {
  struct MapleExtractionParams extraction;
  uint64_t feasible_starts;
  double lambda3;
  uint64_t feasibility_epochs;
  double feasibility_step_size;
  int64_t step_cap;
  uint64_t seed;
} MapleSolveParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or "" after a
// success. The pointer stays valid until the next call on the same thread.
const char *maple_last_error_message(void);

struct MapleExtractionParams maple_extraction_params_default(void);

struct MapleSolveParams maple_solve_params_default(void);

// Parses a problem in the native JSON format.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MapleStatus maple_problem_from_json(const char *json, struct MapleProblem **out);

// Parses a problem in QPLIB format.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be writable.
enum MapleStatus maple_problem_from_qplib(const char *source, struct MapleProblem **out);

// Number of variables, or 0 for a null handle.
//
// # Safety
// `problem` must be null or a live handle.
size_t maple_problem_num_vars(const struct MapleProblem *problem);

// # Safety
// `problem` must be null or a handle not yet freed.
void maple_problem_free(struct MapleProblem *problem);

// Harvests a direction pool for `problem`. `params` may be null for defaults.
//
// # Safety
// Pointers must be null or valid; `out` must be writable.
enum MapleStatus maple_extract(const struct MapleProblem *problem,
                               const struct MapleExtractionParams *params,
                               struct MaplePool **out);

// Exact Graver elements of `problem` inside its difference box.
//
// # Safety
// `problem` must be a live handle; `out` must be writable.
enum MapleStatus maple_oracle(const struct MapleProblem *problem, struct MaplePool **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MapleStatus maple_pool_from_json(const char *json, struct MaplePool **out);

// Serialises the pool; release the string with `maple_string_free`.
//
// # Safety
// `pool` must be a live handle; `out` must be writable.
enum MapleStatus maple_pool_to_json(const struct MaplePool *pool, char **out);

// Number of directions, or 0 for a null handle.
//
// # Safety
// `pool` must be null or a live handle.
size_t maple_pool_len(const struct MaplePool *pool);

// # Safety
// `pool` must be null or a handle not yet freed.
void maple_pool_free(struct MaplePool *pool);

// Runs the full pipeline. A null `pool` triggers extraction; a null
// `params` uses defaults. Finding no feasible point is not an error: the
// report is produced and `maple_report_best` returns `NoSolution`.
//
// # Safety
// Pointers must be null or valid; `out` must be writable.
enum MapleStatus maple_solve(const struct MapleProblem *problem,
                             const struct MaplePool *pool,
                             const struct MapleSolveParams *params,
                             struct MapleReport **out);

// Copies the best point into `x` (capacity `len`) and its value into
// `objective`. Either output may be null to skip it.
//
// # Safety
// `report` must be a live handle; `x` must hold `len` values when non-null.
enum MapleStatus maple_report_best(const struct MapleReport *report,
                                   int64_t *x,
                                   size_t len,
                                   double *objective);

// Serialises the full report; release the string with `maple_string_free`.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum MapleStatus maple_report_to_json(const struct MapleReport *report, char **out);

// # Safety
// `report` must be null or a handle not yet freed.
void maple_report_free(struct MapleReport *report);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void maple_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAPLE_H */
