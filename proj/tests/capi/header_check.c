/* Compiled as C to keep the public header C-clean. */
#include "msqkd/msqkd.h"

int msqkd_header_check_c(void) {
  msqkd_stats* stats = NULL;
  msqkd_keyrate_report rep;
  if (msqkd_stats_predict_depolarization(0.0, 0.0, &stats) != MSQKD_OK) return 1;
  int rc = msqkd_keyrate(stats, &rep) == MSQKD_OK ? 0 : 2;
  msqkd_stats_free(stats);
  return rc;
}
