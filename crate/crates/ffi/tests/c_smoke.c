#include <stdio.h>
#include <string.h>
#include "maple.h"

static const char *WORKED =
    "{\"name\": \"worked\", \"n\": 2, \"m\": 1, \"A\": [[1, 1]], \"b\": [4],"
    " \"l\": [0, 0], \"u\": [3, 3],"
    " \"objective\": {\"type\": \"quadratic\", \"Q\": [[2, 0], [0, 2]], \"c\": [-4, -4], \"c0\": 8}}";

int main(void) {
    MapleProblem *problem = NULL;
    if (maple_problem_from_json(WORKED, &problem) != MAPLE_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", maple_last_error_message());
        return 1;
    }
    MaplePool *pool = NULL;
    if (maple_oracle(problem, &pool) != MAPLE_STATUS_OK || maple_pool_len(pool) != 2) return 2;

    MapleSolveParams params = maple_solve_params_default();
    params.feasible_starts = 10;
    MapleReport *report = NULL;
    if (maple_solve(problem, pool, &params, &report) != MAPLE_STATUS_OK) return 3;

    int64_t x[2];
    double objective = -1.0;
    if (maple_report_best(report, x, 2, &objective) != MAPLE_STATUS_OK) return 4;
    printf("x=(%lld,%lld) f=%g\n", (long long)x[0], (long long)x[1], objective);

    MapleProblem *bad = NULL;
    if (maple_problem_from_json("{", &bad) != MAPLE_STATUS_PARSE || strlen(maple_last_error_message()) == 0) return 5;

    maple_report_free(report);
    maple_pool_free(pool);
    maple_problem_free(problem);
    return (x[0] == 2 && x[1] == 2 && objective == 0.0) ? 0 : 6;
}
