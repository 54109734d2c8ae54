/* semimed: natural direct/indirect treatment effects on a terminal event in
 * semi-competing-risks data.
 *
 * C API of the shared library. All functions return SMD_OK (0) on success or
 * a nonzero smd_status; smd_last_error() describes the most recent failure
 * on the calling thread. Handles are opaque and must be released with the
 * matching *_free function. Handles are immutable once created and may be
 * read from several threads at once.
 */
#ifndef SEMIMED_H
#define SEMIMED_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smd_status {
  SMD_OK = 0,
  SMD_ERR_VALIDATION = 2,       /* malformed input data */
  SMD_ERR_PARTIAL_VARIANCE = 3, /* asymptotic CI refused (partial variance) */
  SMD_ERR_INVALID_ARG = 4,
  SMD_ERR_RUNTIME = 5,
  SMD_ERR_IO = 6
} smd_status;

typedef enum smd_decomposition {
  SMD_DECOMP_PREV = 1, /* prevalence-controlling */
  SMD_DECOMP_HAZ = 2,  /* hazard-controlling */
  SMD_DECOMP_BOTH = 3
} smd_decomposition;

typedef enum smd_ci_method {
  SMD_CI_NONE = 0,
  SMD_CI_ASYMPTOTIC = 1,
  SMD_CI_BOOTSTRAP = 2,
  SMD_CI_BOTH = 3
} smd_ci_method;

enum {
  SMD_EFFECT_TOTAL = 1 << 0,
  SMD_EFFECT_DE = 1 << 1,
  SMD_EFFECT_IE = 1 << 2,
  SMD_EFFECT_DE_ALT = 1 << 3,
  SMD_EFFECT_IE_ALT = 1 << 4,
  SMD_EFFECT_ALL = 31
};

const char* smd_version(void);
/* Message for the last failing call on this thread; empty string if none. */
const char* smd_last_error(void);

/* ---- datasets ---- */

typedef struct smd_dataset smd_dataset;

smd_status smd_dataset_read_csv(const char* path, smd_dataset** out);
smd_status smd_dataset_from_rows(size_t n, const char* const* ids, const int* z,
                                 const double* time_nonterminal,
                                 const int* status_nonterminal,
                                 const double* time_terminal,
                                 const int* status_terminal, smd_dataset** out);
void smd_dataset_free(smd_dataset* d);
/* arm 0 or 1; any other value returns the total count */
size_t smd_dataset_count(const smd_dataset* d, int arm);

/* ---- estimation ---- */

typedef struct smd_estimate_opts {
  int decomposition;    /* smd_decomposition */
  int ci;               /* smd_ci_method */
  unsigned effects;     /* SMD_EFFECT_* bits */
  int n_boot;
  double alpha;
  uint64_t seed;
  int threads;
  const double* grid;   /* NULL: evaluate at all event times up to the horizon */
  size_t grid_len;
} smd_estimate_opts;

void smd_estimate_opts_init(smd_estimate_opts* opts);

typedef struct smd_estimate smd_estimate;

smd_status smd_run_estimate(const smd_dataset* d, const smd_estimate_opts* opts,
                            smd_estimate** out);
void smd_estimate_free(smd_estimate* e);

double smd_estimate_horizon(const smd_estimate* e);
size_t smd_estimate_row_count(const smd_estimate* e);

/* One curves.csv row. String fields point into the estimate handle and stay
 * valid until it is freed. has_se / has_ci flag the optional fields. */
typedef struct smd_curve_row {
  double time;
  const char* z1;           /* "0" / "1", empty for effect rows */
  const char* z2_or_effect; /* "0" / "1" or the effect name */
  const char* decomposition;
  const char* variance_method;
  double estimate;
  double se, ci_lo, ci_hi;
  int has_se, has_ci;
} smd_curve_row;

smd_status smd_estimate_row(const smd_estimate* e, size_t index, smd_curve_row* out);

size_t smd_estimate_warning_count(const smd_estimate* e);
const char* smd_estimate_warning(const smd_estimate* e, size_t index);

/* Writes curves.csv and manifest.json into `dir`. `input_name` is recorded in
 * the manifest. The CSV is byte-identical for identical (data, opts). */
smd_status smd_estimate_write(const smd_estimate* e, const char* dir,
                              const char* input_name);

/* ---- simulation studies ---- */

typedef struct smd_sim_opts {
  int setting;       /* 1..3 use the preset switches; 0 reads a, b, c below */
  int a, b, c;
  size_t m;
  double p_treat;
  double censor_low, censor_high;
  double horizon;
  int n_reps;
  int n_boot;
  uint64_t seed;
  const double* eval_times; /* NULL: 2, 4, 6, 8 */
  size_t n_eval;
  int threads;
} smd_sim_opts;

void smd_sim_opts_init(smd_sim_opts* opts, int setting);

typedef struct smd_study smd_study;

smd_status smd_run_study(const smd_sim_opts* opts, smd_study** out);
void smd_study_free(smd_study* s);

typedef struct smd_study_row {
  int setting;
  const char* effect;
  const char* decomposition;
  const char* truth_assumption;
  const char* stat;
  double t;
  double value;
} smd_study_row;

size_t smd_study_row_count(const smd_study* s);
smd_status smd_study_get_row(const smd_study* s, size_t index, smd_study_row* out);

size_t smd_study_warning_count(const smd_study* s);
const char* smd_study_warning(const smd_study* s, size_t index);

/* Writes study_summary.csv, study_replicates.csv, oracle_curves.csv and
 * manifest.json into `dir`. The CSVs are byte-identical for identical opts. */
smd_status smd_study_write(const smd_study* s, const char* dir);

/* Generates one simulated dataset (replicate `rep`) from the scenario. */
smd_status smd_generate_dataset(const smd_sim_opts* opts, int rep, smd_dataset** out);
smd_status smd_dataset_write_csv(const smd_dataset* d, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SEMIMED_H */
