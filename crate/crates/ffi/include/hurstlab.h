#ifndef HURSTLAB_H
#define HURSTLAB_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_PARAMETER = 2,
  HL_STATUS_EMPTY_INPUT = 3,
  HL_STATUS_DOMAIN = 4,
  HL_STATUS_INSUFFICIENT_SCALES = 5,
  HL_STATUS_DEGENERATE_REGRESSION = 6,
  HL_STATUS_DEGENERATE_SERIES = 7,
  HL_STATUS_CELL_FAILURE = 8,
  HL_STATUS_FORMAT = 9,
  HL_STATUS_ORDERING = 10,
  HL_STATUS_EMPTY_RESULT = 11,
  HL_STATUS_IO = 12,
  HL_STATUS_OUT_OF_RANGE = 13,
  HL_STATUS_PANIC = 14,
} HlStatus;

typedef enum HlMethod {
  HL_METHOD_RS = 0,
  HL_METHOD_DMA = 1,
  HL_METHOD_MFDFA = 2,
  HL_METHOD_GHE = 3,
} HlMethod;

/**
 * Validated estimator configuration.
 */
typedef struct HlConfig HlConfig;

/**
 * Monte Carlo results, one cell per (method, length, alpha).
 */
typedef struct HlMcTable HlMcTable;

/**
 * Plain estimator settings; fill from [`hl_estimator_settings_default`].
 */
typedef struct HlEstimatorSettings {
  size_t scale_base;
  size_t min_scale;
  double max_scale_fraction;
  size_t dma_lambda_min;
  size_t dma_lambda_max;
  size_t ghe_tau_min;
  size_t ghe_tau_max;
  size_t detrend_order;
} HlEstimatorSettings;

typedef struct HlStableParams {
  double alpha;
  double beta;
  double gamma;
  double delta;
} HlStableParams;

typedef struct HlComplex {
  double re;
  double im;
} HlComplex;

/**
 * A method and its moment order. `q` is ignored for R/S and DMA.
 */
typedef struct HlMethodSpec {
  enum HlMethod method;
  double q;
} HlMethodSpec;

typedef struct HlEstimate {
  double hurst;
  double slope;
  double intercept;
  double r_squared;
  size_t n_points;
} HlEstimate;

/**
 * One table cell. `status` is nonzero when every replication failed; the
 * statistics are then NaN.
 */
typedef struct HlMcCell {
  double alpha;
  uint32_t log2_length;
  struct HlMethodSpec method;
  double mean;
  double q025;
  double q975;
  size_t n_effective;
  size_t n_failed;
  enum HlStatus status;
} HlMcCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next library call on this thread.
 */
const char *hl_last_error_message(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hl_string_free(char *s);

struct HlEstimatorSettings hl_estimator_settings_default(void);

/**
 * Creates a configuration; `settings` may be null for the defaults.
 *
 * # Safety
 * `settings` must be null or valid; `out` must be writable.
 */
enum HlStatus hl_config_new(const struct HlEstimatorSettings *settings, struct HlConfig **out);

/**
 * # Safety
 * `config` must be null or come from [`hl_config_new`].
 */
enum HlStatus hl_config_settings(const struct HlConfig *config, struct HlEstimatorSettings *out);

/**
 * # Safety
 * `config` must be null or come from [`hl_config_new`], freed once.
 */
void hl_config_free(struct HlConfig *config);

/**
 * Writes `n` stable draws to `out`.
 *
 * # Safety
 * `params` must be valid and `out` must hold `n` doubles.
 */
enum HlStatus hl_sample_stable(const struct HlStableParams *params,
                               size_t n,
                               uint64_t seed,
                               double *out);

/**
 * Characteristic function of the stable law at `u`.
 *
 * # Safety
 * `params` must be valid and `out` writable.
 */
enum HlStatus hl_stable_cf(const struct HlStableParams *params, double u, struct HlComplex *out);

/**
 * Estimates the Hurst exponent of `len` increments. `config` may be null.
 *
 * # Safety
 * `values` must hold `len` doubles, `method` and `out` must be valid.
 */
enum HlStatus hl_estimate(const double *values,
                          size_t len,
                          const struct HlMethodSpec *method,
                          const struct HlConfig *config,
                          struct HlEstimate *out);

/**
 * Runs a grid. `config` may be null for the default estimator settings.
 *
 * # Safety
 * Array arguments must hold the stated counts; `out` must be writable.
 */
enum HlStatus hl_mc_run(const double *alphas,
                        size_t n_alphas,
                        const uint32_t *log2_lengths,
                        size_t n_lengths,
                        const struct HlMethodSpec *methods,
                        size_t n_methods,
                        size_t replications,
                        uint64_t seed,
                        const struct HlConfig *config,
                        struct HlMcTable **out);

/**
 * Number of cells, or 0 for a null table.
 *
 * # Safety
 * `table` must be null or come from [`hl_mc_run`].
 */
size_t hl_mc_table_len(const struct HlMcTable *table);

/**
 * # Safety
 * `table` must come from [`hl_mc_run`]; `out` must be writable.
 */
enum HlStatus hl_mc_table_cell(const struct HlMcTable *table, size_t index, struct HlMcCell *out);

/**
 * The table as CSV. Release with [`hl_string_free`].
 *
 * # Safety
 * `table` must come from [`hl_mc_run`]; `out` must be writable.
 */
enum HlStatus hl_mc_table_csv(const struct HlMcTable *table, char **out);

/**
 * # Safety
 * `table` must be null or come from [`hl_mc_run`], freed once.
 */
void hl_mc_table_free(struct HlMcTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HURSTLAB_H */
