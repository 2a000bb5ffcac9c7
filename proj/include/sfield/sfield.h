/*
 * sfield C API: normality testing for spatially indexed functional data.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an sfield_status;
 * on failure sfield_last_error() holds a message for the calling thread.
 * Strings returned through char** are released with sfield_free_string.
 */
#ifndef SFIELD_H
#define SFIELD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SFIELD_API __declspec(dllexport)
#else
#define SFIELD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfield_status {
  SFIELD_OK = 0,
  SFIELD_ERR_ARGUMENT = 1,       /* null handle or out-of-range index */
  SFIELD_ERR_INVALID_INPUT = 2,
  SFIELD_ERR_INVALID_CONFIG = 3,
  SFIELD_ERR_PARSE = 4,
  SFIELD_ERR_NUMERICAL = 5,
  SFIELD_ERR_DOMAIN = 6,
  SFIELD_ERR_IO = 7,
  SFIELD_ERR_INTERNAL = 8
} sfield_status;

typedef enum sfield_basis_kind {
  SFIELD_BASIS_FROM_FILE = -1,
  SFIELD_BASIS_FOURIER = 0,
  SFIELD_BASIS_BSPLINE = 1
} sfield_basis_kind;

typedef enum sfield_weight_kind {
  SFIELD_WEIGHT_BARTLETT = 0,
  SFIELD_WEIGHT_BARTLETT_PRODUCT = 1
} sfield_weight_kind;

typedef enum sfield_format {
  SFIELD_FORMAT_TABLE = 0,
  SFIELD_FORMAT_CSV = 1,
  SFIELD_FORMAT_JSONL = 2
} sfield_format;

typedef struct sfield_sample sfield_sample;
typedef struct sfield_report sfield_report;
typedef struct sfield_mc_table sfield_mc_table;

SFIELD_API const char* sfield_version(void);
SFIELD_API const char* sfield_status_string(sfield_status status);
SFIELD_API const char* sfield_last_error(void);
/* 1-based data row of the last parse error, 0 if none. */
SFIELD_API size_t sfield_last_error_row(void);
SFIELD_API void sfield_free_string(char* s);
/* 0 = hardware concurrency. */
SFIELD_API void sfield_set_threads(unsigned threads);

SFIELD_API sfield_status sfield_chisq_sf(double x, int df, double* out);

/* ---- samples ---------------------------------------------------------- */

/* coeffs: N x k row-major, N = prod(dims). */
SFIELD_API sfield_status sfield_sample_create(const size_t* dims, size_t ndims, const double* coeffs, size_t k,
                                              sfield_basis_kind basis, sfield_sample** out);
/* dims may be NULL (taken from the '# dims=' header); k = 0 takes the file's. */
SFIELD_API sfield_status sfield_sample_read_csv(const char* path, const size_t* dims, size_t ndims,
                                                sfield_basis_kind basis, size_t k, sfield_sample** out);
SFIELD_API sfield_status sfield_sample_write_csv(const sfield_sample* sample, const char* path);
SFIELD_API size_t sfield_sample_ndims(const sfield_sample* sample);
SFIELD_API size_t sfield_sample_extent(const sfield_sample* sample, size_t axis);
SFIELD_API size_t sfield_sample_size(const sfield_sample* sample);
SFIELD_API size_t sfield_sample_basis_dimension(const sfield_sample* sample);
SFIELD_API sfield_status sfield_sample_coeffs(const sfield_sample* sample, double* out, size_t count);
SFIELD_API void sfield_sample_free(sfield_sample* sample);

typedef struct sfield_sim_options {
  size_t dims[2];
  size_t k;                  /* basis dimension, default 15 */
  const char* distribution;  /* "gaussian" or "su(tau,kappa)" */
  size_t burnin;             /* default 50 */
  uint64_t seed;
  double norm_a;             /* default 0.6 */
  double norm_b;             /* default 0.35 */
} sfield_sim_options;

SFIELD_API void sfield_sim_options_init(sfield_sim_options* options);
SFIELD_API sfield_status sfield_sample_simulate(const sfield_sim_options* options, sfield_sample** out);

/* ---- normality test --------------------------------------------------- */

typedef struct sfield_test_options {
  double q[3];
  size_t nq;               /* 0: q_i = sqrt(n_i) */
  size_t grid_points;      /* 0: automatic */
  long truncation;         /* L; -1: weight threshold rule */
  long score_max_lag;      /* L'; -1: ceil(max q) */
  size_t levels;           /* p; 0: variance threshold rule */
  double var_threshold;    /* default 0.85 */
  double weight_threshold; /* default 0.95 */
  sfield_weight_kind weight;
  int strict_boundary;
  int strict_variance;
} sfield_test_options;

typedef struct sfield_level_stats {
  size_t level;
  double S;
  double K;
  double var_s;
  double var_k;
  double J;
  int var_s_floored;
} sfield_level_stats;

typedef struct sfield_tuning {
  double q[3];
  size_t nq;
  size_t grid_points;
  long truncation;
  long score_max_lag;
  size_t levels;
  double var_threshold;
  double weight_threshold;
  double variance_captured;
  double filter_weight;
} sfield_tuning;

SFIELD_API void sfield_test_options_init(sfield_test_options* options);
SFIELD_API sfield_status sfield_run_test(const sfield_sample* sample, const sfield_test_options* options,
                                         sfield_report** out);
SFIELD_API size_t sfield_report_levels(const sfield_report* report);
SFIELD_API sfield_status sfield_report_level(const sfield_report* report, size_t index, sfield_level_stats* out);
SFIELD_API double sfield_report_statistic(const sfield_report* report);
SFIELD_API int sfield_report_df(const sfield_report* report);
SFIELD_API double sfield_report_pvalue(const sfield_report* report);
SFIELD_API sfield_status sfield_report_tuning(const sfield_report* report, sfield_tuning* out);
SFIELD_API sfield_status sfield_report_render(const sfield_report* report, sfield_format format, char** out);
SFIELD_API void sfield_report_free(sfield_report* report);

/* CSV dumps of intermediate pipeline stages. */
SFIELD_API sfield_status sfield_spectrum_csv(const sfield_sample* sample, const sfield_test_options* options,
                                             char** out);
SFIELD_API sfield_status sfield_filters_csv(const sfield_sample* sample, const sfield_test_options* options,
                                            char** out);

/* ---- Monte Carlo study ------------------------------------------------ */

typedef struct sfield_mc_overrides {
  int has_seed;
  uint64_t seed;
  double alpha;         /* <= 0: keep */
  size_t replications;  /* 0: keep */
} sfield_mc_overrides;

typedef struct sfield_mc_cell {
  size_t dims[3];
  size_t ndims;
  const char* distribution;  /* valid while the table lives */
  size_t levels;
  size_t rejections;
  size_t completed;
  size_t failures;
  double rate;
  double standard_error;
} sfield_mc_cell;

SFIELD_API sfield_status sfield_mc_study_run(const char* config_text, const sfield_mc_overrides* overrides,
                                             sfield_mc_table** out);
SFIELD_API sfield_status sfield_mc_study_run_file(const char* config_path, const sfield_mc_overrides* overrides,
                                                  sfield_mc_table** out);
SFIELD_API size_t sfield_mc_table_cells(const sfield_mc_table* table);
SFIELD_API sfield_status sfield_mc_table_cell(const sfield_mc_table* table, size_t index, sfield_mc_cell* out);
SFIELD_API sfield_status sfield_mc_table_render_csv(const sfield_mc_table* table, char** out);
SFIELD_API void sfield_mc_table_free(sfield_mc_table* table);

#ifdef __cplusplus
}
#endif

#endif /* SFIELD_H */
