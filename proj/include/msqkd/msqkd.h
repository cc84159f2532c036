#ifndef MSQKD_H
#define MSQKD_H

/* C interface to the M-SQKD simulation and key-rate library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returns an msqkd_status; on failure msqkd_last_error() holds a
 * message for the calling thread until its next failing call. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MSQKD_API __declspec(dllexport)
#else
#define MSQKD_API __attribute__((visibility("default")))
#endif

typedef enum msqkd_status {
  MSQKD_OK = 0,
  MSQKD_INVALID_ARGUMENT = 1,
  MSQKD_INFEASIBLE = 2,
  MSQKD_MISSING_CELLS = 3,
  MSQKD_ISOMETRY = 4,
  MSQKD_IO = 5,
  MSQKD_PARSE = 6,
  MSQKD_DIMENSION = 7,
  MSQKD_INTERNAL = 99
} msqkd_status;

typedef enum msqkd_mode { MSQKD_MODE_NOFLIP = 0, MSQKD_MODE_FLIP = 1 } msqkd_mode;

typedef enum msqkd_mode_policy {
  MSQKD_POLICY_AUTO = 0,
  MSQKD_POLICY_FORCE_FLIP = 1,
  MSQKD_POLICY_FORCE_NOFLIP = 2
} msqkd_mode_policy;

typedef struct msqkd_stats msqkd_stats;
typedef struct msqkd_attack msqkd_attack;
typedef struct msqkd_transcript msqkd_transcript;
typedef struct msqkd_sweep msqkd_sweep;

MSQKD_API const char* msqkd_version(void);
MSQKD_API const char* msqkd_last_error(void);

/* ---- statistics ---- */

MSQKD_API msqkd_status msqkd_stats_predict_depolarization(double q_forward, double q_reverse,
                                                          msqkd_stats** out);
MSQKD_API msqkd_status msqkd_stats_predict_attack(const msqkd_attack* attack, msqkd_stats** out);
MSQKD_API msqkd_status msqkd_stats_read(const char* path, msqkd_stats** out);
MSQKD_API msqkd_status msqkd_stats_write(const msqkd_stats* stats, const char* path);
/* The same text as msqkd_stats_write, copied into buf like msqkd_stats_missing. */
MSQKD_API msqkd_status msqkd_stats_format(const msqkd_stats* stats, char* buf, size_t buf_size,
                                          size_t* needed);
/* Cell names are "P_ij" and "Pm_xy_m" with x, y in {0, 1, R}. *present is 0
 * for cells the data leaves undefined. */
MSQKD_API msqkd_status msqkd_stats_get(const msqkd_stats* stats, const char* cell, double* value,
                                       int* present);
/* Space-separated names, copied into buf (NUL-terminated, truncated to
 * buf_size). *needed receives the full length including the terminator. */
MSQKD_API msqkd_status msqkd_stats_missing(const msqkd_stats* stats, char* buf, size_t buf_size,
                                           size_t* needed);
MSQKD_API msqkd_status msqkd_stats_low_confidence(const msqkd_stats* stats, uint64_t min_samples,
                                                  char* buf, size_t buf_size, size_t* needed);
MSQKD_API void msqkd_stats_free(msqkd_stats* stats);

/* ---- attacks ---- */

MSQKD_API msqkd_status msqkd_attack_read(const char* path, msqkd_attack** out);
MSQKD_API msqkd_status msqkd_attack_honest(msqkd_attack** out);
MSQKD_API msqkd_status msqkd_attack_eve_dim(const msqkd_attack* attack, size_t* eve_dim);
/* H(A|E) of the attack computed from its density matrix. */
MSQKD_API msqkd_status msqkd_attack_exact_entropy(const msqkd_attack* attack, double* h_ae);
MSQKD_API void msqkd_attack_free(msqkd_attack* attack);

/* ---- simulation ---- */

typedef struct msqkd_sim_config {
  uint64_t rounds;
  double p_measure;
  double sample_fraction;
  double q_forward;
  double q_reverse;
  const msqkd_attack* attack; /* NULL for the honest server */
  uint64_t seed;
  msqkd_mode_policy mode_policy;
  unsigned threads; /* 0 = hardware concurrency */
} msqkd_sim_config;

MSQKD_API void msqkd_sim_config_init(msqkd_sim_config* cfg);

typedef struct msqkd_record {
  uint64_t index;
  int choice_a; /* 0 = Measure-Resend, 1 = Reflect */
  int choice_b;
  int outcome_a; /* -1 when absent */
  int outcome_b;
  int msg_to_a;
  int msg_to_b;
  int in_sample;
} msqkd_record;

typedef struct msqkd_raw_key_summary {
  msqkd_mode mode;
  uint64_t length;
  uint64_t mismatches;
} msqkd_raw_key_summary;

/* Runs every round and the sampling stage. A message-consistency abort is
 * not an error: check msqkd_transcript_aborted. */
MSQKD_API msqkd_status msqkd_simulate(const msqkd_sim_config* cfg, msqkd_transcript** out);
MSQKD_API msqkd_status msqkd_transcript_read(const char* path, msqkd_transcript** out);
MSQKD_API msqkd_status msqkd_transcript_write(const msqkd_transcript* t, const char* path);
MSQKD_API int msqkd_transcript_aborted(const msqkd_transcript* t);
MSQKD_API size_t msqkd_transcript_size(const msqkd_transcript* t);
MSQKD_API msqkd_status msqkd_transcript_get(const msqkd_transcript* t, size_t i, msqkd_record* out);
MSQKD_API msqkd_status msqkd_transcript_tally(const msqkd_transcript* t, msqkd_stats** out);
/* Raw key under `policy`, with the mode resolved from `stats` when AUTO. */
MSQKD_API msqkd_status msqkd_transcript_raw_key(const msqkd_transcript* t, const msqkd_stats* stats,
                                                msqkd_mode_policy policy, msqkd_raw_key_summary* out);
MSQKD_API void msqkd_transcript_free(msqkd_transcript* t);

/* ---- key rate ---- */

typedef struct msqkd_keyrate_report {
  double h_ae_lower;
  double splits[4];
  double h_ab_noflip;
  double h_ab_flip;
  double rate_noflip;
  double rate_flip;
  double rate_best;
  msqkd_mode chosen_mode;
  double p_key_noflip[2][2];
  double p_key_flip[2][2];
} msqkd_keyrate_report;

/* MSQKD_MISSING_CELLS and MSQKD_INFEASIBLE carry the details in
 * msqkd_last_error(). */
MSQKD_API msqkd_status msqkd_keyrate(const msqkd_stats* stats, msqkd_keyrate_report* out);

/* ---- sweeps ---- */

typedef struct msqkd_sweep_config {
  double q_max;
  size_t steps;
  double forward_multiplier;
  double reverse_multiplier;
  unsigned threads;
} msqkd_sweep_config;

typedef struct msqkd_sweep_row {
  double q, qf, qr;
  double h_ae;
  double h_ab_noflip, h_ab_flip;
  double rate_noflip, rate_flip, rate_best;
  msqkd_mode mode;
} msqkd_sweep_row;

MSQKD_API void msqkd_sweep_config_init(msqkd_sweep_config* cfg);
MSQKD_API msqkd_status msqkd_sweep_run(const msqkd_sweep_config* cfg, msqkd_sweep** out);
MSQKD_API size_t msqkd_sweep_size(const msqkd_sweep* sweep);
MSQKD_API msqkd_status msqkd_sweep_get(const msqkd_sweep* sweep, size_t i, msqkd_sweep_row* out);
MSQKD_API void msqkd_sweep_free(msqkd_sweep* sweep);
MSQKD_API msqkd_status msqkd_zero_rate_threshold(double forward_multiplier, double reverse_multiplier,
                                                 double lo, double hi, double tol, double* q_star);

/* ---- reduction check ---- */

typedef struct msqkd_reduce_config {
  uint64_t trials;
  size_t eve_dim;
  uint64_t seed;
  size_t rounds; /* 1 or 2 */
  double tolerance;
} msqkd_reduce_config;

typedef struct msqkd_reduce_summary {
  uint64_t cases;
  uint64_t failures;
  int64_t first_failing_trial; /* -1 when none */
  uint64_t first_failing_seed;
  double min_fidelity;
  double min_non_abort;
} msqkd_reduce_summary;

MSQKD_API void msqkd_reduce_config_init(msqkd_reduce_config* cfg);
/* Trial t draws a random attack from seed `seed + t`. When `fixed` is not
 * NULL it is checked (single round, every choice pair) instead. */
MSQKD_API msqkd_status msqkd_reduce_check(const msqkd_reduce_config* cfg, const msqkd_attack* fixed,
                                          msqkd_reduce_summary* out);

#ifdef __cplusplus
}
#endif

#endif
