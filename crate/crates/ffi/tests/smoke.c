#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include "icsim.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    enum IcsimStatus s_ = (call);                                          \
    if (s_ != ICSIM_STATUS_OK) {                                           \
      fprintf(stderr, "%s -> %d: %s\n", #call, s_, icsim_last_error());   \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  IcsimParams pp = {1.0, 1.0, 1.0, 4, 8, 4};
  IcsimProblem *problem = NULL;
  CHECK(icsim_problem_new(ICSIM_INSTANCE_KIND_CHAIN, &pp, &problem));

  size_t n = 0;
  CHECK(icsim_problem_dim(problem, &n));
  double *x = calloc(n, sizeof(double));
  double *g = calloc(n, sizeof(double));
  double f = 1.0;
  CHECK(icsim_problem_eval(problem, x, n, &f, g));
  if (f != 0.0 || !(g[0] < 0.0)) return 2;

  double v;
  enum IcsimOutcome z;
  CHECK(icsim_problem_draw(problem, x, n, 1, 0, 0, 0, g, &v, &z));

  IcsimRunResult *res = NULL;
  CHECK(icsim_run(problem, ICSIM_ALGORITHM_MINIBATCH_ACSA, &pp, 3, &res));
  size_t rounds = 0;
  CHECK(icsim_run_result_rounds(res, &rounds));
  if (rounds != pp.r) return 3;
  double *sub = calloc(rounds, sizeof(double));
  CHECK(icsim_run_result_suboptimality(res, sub, rounds));
  if (!(sub[rounds - 1] > 0.0)) return 4;

  if (icsim_problem_new(42, &pp, &problem) != ICSIM_STATUS_INVALID_ARGUMENT) return 5;
  if (icsim_last_error() == NULL) return 6;

  icsim_run_result_free(res);
  icsim_problem_free(problem);
  free(x);
  free(g);
  free(sub);
  printf("ok\n");
  return 0;
}
