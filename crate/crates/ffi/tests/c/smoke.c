#include <stdio.h>
#include <string.h>

#include "iwasawa.h"

#define CHECK(cond)                                                \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "check failed line %d: %s\n", __LINE__, #cond); \
      return 1;                                                    \
    }                                                              \
  } while (0)

int main(void) {
  int64_t degrees[] = {0, 2, 4};
  uint64_t ranks[] = {1, 1, 1};
  IwSpectrum *cp2 = NULL;
  CHECK(iw_spectrum_new(5, degrees, ranks, 3, &cp2) == IW_STATUS_OK);

  int64_t chi = 0;
  CHECK(iw_euler_characteristic(cp2, &chi) == IW_STATUS_OK && chi == 3);
  uint64_t lambda = 0;
  CHECK(iw_eigenspace_lambda(cp2, 0, 2, &lambda) == IW_STATUS_OK && lambda == 1);

  char *csv = NULL;
  bool ok = false;
  CHECK(iw_imc_report_csv(cp2, -3, -3, &csv, &ok) == IW_STATUS_OK && ok);
  CHECK(strcmp(csv, "m,side,lhs_val,rhs_val,in_window,match\n-3,2m-1,0,0,true,true\n-3,2m,0,0,true,true\n") == 0);
  iw_string_free(csv);

  uint64_t order = 0;
  CHECK(iw_sphere_order(3, 0, &order) == IW_STATUS_OK && order == IW_INFINITE);
  CHECK(iw_sphere_order(9, 3, &order) == IW_STATUS_INVALID_PRIME);
  CHECK(strlen(iw_last_error()) > 0);

  iw_spectrum_free(cp2);
  puts("ok");
  return 0;
}
