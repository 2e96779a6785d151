/* driftwatch: distribution-free change-point monitoring for high-dimensional
 * streams. C API over the core library; every object is an opaque handle and
 * every call returns a dw_status. On failure, dw_last_error() describes what
 * went wrong (the message is thread-local and valid until the next failing
 * call on the same thread).
 */
#ifndef DRIFTWATCH_H
#define DRIFTWATCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DW_API __declspec(dllexport)
#else
#define DW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dw_status {
  DW_OK = 0,
  DW_ERR_INVALID_ARGUMENT = 1,
  DW_ERR_NOT_POSITIVE_DEFINITE = 2,
  DW_ERR_STATE = 3,
  DW_ERR_PARSE = 4,
  DW_ERR_IO = 5,
  DW_ERR_VALIDATION = 6,
  DW_ERR_INTERNAL = 7
} dw_status;

DW_API const char* dw_version(void);
DW_API const char* dw_last_error(void);

/* ---- opaque handles ---- */

typedef struct dw_limits dw_limits;    /* calibrated control-limit profile */
typedef struct dw_dist dw_dist;        /* resolved distribution document */
typedef struct dw_scenario dw_scenario;/* planted-change scenario */
typedef struct dw_monitor dw_monitor;  /* online monitoring state */
typedef struct dw_reader dw_reader;    /* observation source */

/* ---- calibration ---- */

typedef struct dw_calibration_settings {
  uint32_t w;               /* window size */
  uint32_t l0;              /* quarantine constant */
  double alpha;             /* conditional per-window false-alarm rate */
  uint32_t replications;    /* Monte-Carlo streams */
  uint32_t sequence_length; /* observations per stream */
  uint32_t survivor_floor;  /* stop estimating below this many live streams */
  uint32_t tail_pool;       /* limits pooled into the frozen tail value */
  uint64_t seed;
  /* NULL for the fast uniform-norms source; otherwise a distribution
   * document (JSON) describing the stream to calibrate on. */
  const char* source_json;
} dw_calibration_settings;

/* Fills defaults: w=15, l0=3, alpha=0.004, replications=10000,
 * sequence_length=2500, survivor_floor=100, tail_pool=50, seed=0,
 * source_json=NULL. */
DW_API void dw_calibration_settings_init(dw_calibration_settings* settings);

DW_API dw_status dw_calibrate(const dw_calibration_settings* settings,
                              dw_limits** out);
DW_API dw_status dw_limits_load(const char* path, dw_limits** out);
DW_API dw_status dw_limits_save(const dw_limits* limits, const char* path);
DW_API void dw_limits_free(dw_limits* limits);

DW_API uint32_t dw_limits_count(const dw_limits* limits);
/* 1-based window index; indices past the estimated range return the tail. */
DW_API dw_status dw_limits_at(const dw_limits* limits, uint64_t window,
                              double* out);
DW_API double dw_limits_tail(const dw_limits* limits);
DW_API uint32_t dw_limits_w(const dw_limits* limits);
DW_API uint32_t dw_limits_l0(const dw_limits* limits);
DW_API double dw_limits_alpha(const dw_limits* limits);

/* ---- distribution and scenario documents ---- */

DW_API dw_status dw_dist_parse(const char* json_text, uint64_t resolve_seed,
                               dw_dist** out);
DW_API void dw_dist_free(dw_dist* dist);

DW_API dw_status dw_scenario_load(const char* path, uint64_t resolve_seed,
                                  dw_scenario** out);
DW_API void dw_scenario_free(dw_scenario* scenario);
DW_API uint64_t dw_scenario_tau(const dw_scenario* scenario);

/* ---- online monitoring ---- */

typedef enum dw_step_kind {
  DW_STEP_WARMING = 0,
  DW_STEP_POINT = 1,
  DW_STEP_SIGNAL = 2
} dw_step_kind;

typedef enum dw_side { DW_SIDE_UPPER = 0, DW_SIDE_LOWER = 1 } dw_side;

typedef struct dw_step {
  int kind;            /* dw_step_kind */
  uint64_t window;
  double statistic;
  double limit;
  int signaled;        /* nonzero on a signal row */
  int side;            /* dw_side; signal only */
  uint32_t partition_index; /* 1-based; signal only */
  uint64_t tau_hat;    /* signal only */
} dw_step;

DW_API dw_status dw_monitor_new(const dw_limits* limits, int restart_on_signal,
                                dw_monitor** out);
DW_API void dw_monitor_free(dw_monitor* monitor);
DW_API dw_status dw_monitor_push_norm(dw_monitor* monitor, double norm,
                                      dw_step* out);
DW_API dw_status dw_monitor_push_vector(dw_monitor* monitor,
                                        const double* values, size_t p,
                                        dw_step* out);
DW_API uint64_t dw_monitor_trace_rows(const dw_monitor* monitor);
DW_API dw_status dw_monitor_trace_row(const dw_monitor* monitor, uint64_t index,
                                      dw_step* out);
DW_API dw_status dw_monitor_write_trace_csv(const dw_monitor* monitor,
                                            const char* path);

/* ---- observation sources ---- */

DW_API dw_status dw_reader_open_csv(const char* path, int has_header,
                                    dw_reader** out);
DW_API dw_status dw_reader_open_norms(const char* path, int has_header,
                                      dw_reader** out);
DW_API dw_status dw_reader_open_images(const char* dir, dw_reader** out);
/* Yields the next observation; *p is 0 at end of stream. The pointer stays
 * valid until the next call on the same reader. */
DW_API dw_status dw_reader_next(dw_reader* reader, const double** values,
                                size_t* p);
DW_API int dw_reader_yields_norms(const dw_reader* reader);
DW_API void dw_reader_free(dw_reader* reader);

/* ---- run-length studies ---- */

typedef struct dw_run_summary {
  double arl;
  double mrl;
  uint64_t n_runs;
  uint64_t censored;
  uint64_t horizon;
  double median_tau_hat; /* NaN when no replicate signaled / IC study */
  double detection_rate; /* NaN for IC studies */
} dw_run_summary;

DW_API dw_status dw_ic_study(const dw_limits* limits, const dw_dist* dist,
                             uint32_t replications, uint32_t max_windows,
                             uint64_t seed, dw_run_summary* out);
DW_API dw_status dw_ooc_study(const dw_limits* limits,
                              const dw_scenario* scenario,
                              uint32_t replications, uint32_t horizon,
                              uint64_t seed, dw_run_summary* out);
/* Runs every cell of a grid document and writes the result table as CSV
 * (to stdout when out_csv is NULL or empty). horizon 0 means the default
 * simulated sequence of 2500 observations. */
DW_API dw_status dw_sensitivity_run(const char* grid_path,
                                    uint32_t replications, uint32_t horizon,
                                    uint64_t seed, const char* out_csv);

/* ---- stat kernel (stateless helpers) ---- */

DW_API dw_status dw_l2_norm(const double* values, size_t p, double* out);
DW_API dw_status dw_weighted_precedence(const double* first, size_t n_first,
                                        const double* second, size_t n_second,
                                        double* out);
/* out must hold w - 2*l0 + 1 values. */
DW_API dw_status dw_partition_statistics(const double* window, size_t w,
                                         uint32_t l0, double* out);
DW_API dw_status dw_window_statistic(const double* parts, size_t n, double* out);
DW_API dw_status dw_quantile(const double* sample, size_t n, double q,
                             double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DRIFTWATCH_H */
