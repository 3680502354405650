#include <math.h>
#include <stdio.h>
#include "hardylab.h"

#define CHECK(expr)                                                          \
  do {                                                                       \
    if (!(expr)) {                                                           \
      const char *msg = hardy_last_error_message();                          \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #expr,         \
              msg ? msg : "no error");                                       \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main(void) {
  HardyWeights *w = NULL;
  HardyLambda *l = NULL;
  HardyCondition cond;
  HardyBounds bounds;
  double x[3] = {1.0, 3.0, -2.0};
  const double zeta2 = 1.6449340668482264;

  CHECK(hardy_weights_power(0.0, &w) == HARDY_STATUS_OK);
  CHECK(hardy_lambda_unit(&l) == HARDY_STATUS_OK);
  CHECK(hardy_best_u_prime(w, l, 2.0, 200, &cond) == HARDY_STATUS_OK);
  CHECK(fabs(cond.u_prime - zeta2) < 1e-4);
  CHECK(!cond.exact);
  CHECK(hardy_u_bounds(cond.u_prime, 2.0, &bounds) == HARDY_STATUS_OK);
  CHECK(bounds.upper_new < bounds.upper_bge);
  CHECK(hardy_best_u_prime(w, l, 1.0, 10, &cond) == HARDY_STATUS_DIVERGENT_SERIES);
  CHECK(hardy_last_error_message() != NULL);

  CHECK(hardy_isotonic_project(x, 3, x) == HARDY_STATUS_OK);
  CHECK(x[0] == 2.0 && x[1] == 2.0 && x[2] == 0.0);

  hardy_weights_free(w);
  hardy_lambda_free(l);
  printf("ok %s\n", hardy_version());
  return 0;
}
