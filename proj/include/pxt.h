/*
 * pxt - return decomposition and forecasting with price extremes.
 *
 * C interface to the pxt core. All functions returning pxt_status set a
 * thread-local error message retrievable via pxt_last_error() on failure.
 * Objects returned through out-parameters are owned by the caller and
 * released with the matching *_free function.
 */
#ifndef PXT_H
#define PXT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    PXT_OK = 0,
    PXT_ERR_DATA = 1,    /* unreadable/invalid input data */
    PXT_ERR_NUMERIC = 2, /* singular system, failed estimation, bad argument */
    PXT_ERR_CONFIG = 3   /* malformed configuration */
} pxt_status;

typedef enum { PXT_DAILY = 0, PXT_MONTHLY = 1, PXT_QUARTERLY = 2 } pxt_frequency;
typedef enum { PXT_HIGH_EXTREME = 0, PXT_LOW_EXTREME = 1 } pxt_convention;

typedef struct pxt_bars pxt_bars;
typedef struct pxt_decomposition pxt_decomposition;
typedef struct pxt_engine pxt_engine;

const char* pxt_version(void);
const char* pxt_last_error(void);

/* ---- OHLC bar series ---------------------------------------------------- */

/* CSV with header date,open,high,low,close; bars are validated on load. */
pxt_status pxt_bars_load(const char* path, pxt_frequency frequency, pxt_bars** out);
pxt_status pxt_bars_to_quarterly(const pxt_bars* monthly, pxt_bars** out);
long pxt_bars_count(const pxt_bars* bars);
void pxt_bars_free(pxt_bars* bars);

/* ---- return decomposition ----------------------------------------------- */

pxt_status pxt_decompose(const pxt_bars* bars, pxt_convention convention,
                         pxt_decomposition** out);
long pxt_decomposition_size(const pxt_decomposition* d);
/* field is one of "r_full", "r", "ovr", "pmg", "pml"; capacity must be at
 * least pxt_decomposition_size(d). */
pxt_status pxt_decomposition_values(const pxt_decomposition* d, const char* field,
                                    double* buffer, long capacity);
void pxt_decomposition_free(pxt_decomposition* d);

/* ---- statistics over raw arrays ------------------------------------------ */

typedef struct {
    double mean;
    double std_dev;
    double max;
    double min;
    double skewness;
    double kurtosis; /* non-excess */
    double jarque_bera;
    double jb_pvalue;
    double ljung_box_q;
    double ljung_box_p;
    long n;
} pxt_summary;

pxt_status pxt_summarize(const double* x, long n, int q_lag, pxt_summary* out);

typedef struct {
    double f_stat;
    double p_value;
    long n_used;
} pxt_granger;

/* Tests whether x Granger-causes y with `lag` lags of each series. */
pxt_status pxt_granger_test(const double* x, const double* y, long n, int lag,
                            pxt_granger* out);

/* Fits the AIC-best ARMA-GARCH model to sqrt(x) and writes the filtered
 * (re-standardized residual) series into out_filtered (length n). The label
 * of the selected specification is copied into spec_label when non-NULL. */
pxt_status pxt_filter_series(const double* x, long n, double* out_filtered,
                             char* spec_label, long label_capacity);

typedef struct {
    double r2_oos;
    double clark_west_stat;
    double clark_west_p; /* one-sided, upper tail */
    int var_order;
} pxt_oos;

/* Static out-of-sample evaluation of the two-variable system against the
 * expanding-mean benchmark; split is the first out-of-sample index. */
pxt_status pxt_evaluate_oos(const double* pmg, const double* pml, const double* r, long n,
                            long split, int q_max, pxt_oos* out);

/* ---- pipeline engine ------------------------------------------------------ */

/* config_json uses the same keys as the CLI configuration file; pass "{}"
 * for defaults. */
pxt_status pxt_engine_create(const char* config_json, pxt_engine** out);
/* subcommand: decompose, describe, fit, granger, var, oos, controls,
 * simulate (argument = task) or all. */
pxt_status pxt_engine_run(pxt_engine* engine, const char* subcommand, const char* argument);
/* JSON summary (files written, notes) of the most recent successful run. */
const char* pxt_engine_summary(const pxt_engine* engine);
void pxt_engine_free(pxt_engine* engine);

#ifdef __cplusplus
}
#endif

#endif /* PXT_H */
