/* C interface to the L-function oscillation library. All functions return a
 * status code (LFOSC_OK = 0); on failure lfosc_last_error() describes the
 * problem for the calling thread. Objects come back through opaque handles
 * owned by the caller and released with the matching _free function. */
#ifndef LFOSC_H
#define LFOSC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef LFOSC_API
#define LFOSC_API __attribute__((visibility("default")))
#endif

#define LFOSC_OK 0
#define LFOSC_E_INVALID_ARGUMENT 1
#define LFOSC_E_PRECONDITION 2
#define LFOSC_E_PARSE 3
#define LFOSC_E_DATA 4
#define LFOSC_E_RANGE 5
#define LFOSC_E_IO 6
#define LFOSC_E_INSUFFICIENT_DATA 7
#define LFOSC_E_CHECK_FAILED 8
#define LFOSC_E_INTERNAL 9

typedef struct lfosc_series lfosc_series;  /* real coefficient sequence a(1..N) */
typedef struct lfosc_satake lfosc_satake;  /* per-prime local parameters */
typedef struct lfosc_report lfosc_report;  /* window scan results */

typedef struct lfosc_profile {
  double alpha, beta, gamma; /* a(n)=O(n^a), sum=O(x^b), sum sq = cx+O(x^g) */
  double r;                  /* window exponent */
  double epsilon;
  int valid; /* criterion predicate: a+b < 1 and max{a+b, g} < r < 1 */
} lfosc_profile;

typedef struct lfosc_fit {
  double slope;             /* c in c*x^s */
  double exponent;          /* s */
  double exponent_stderr;
  double residual_exponent; /* envelope slope of |S(x) - c*x^s| */
  int flagged;              /* nonpositive slope or other defect */
} lfosc_fit;

LFOSC_API const char* lfosc_version(void);
/* Message for the most recent failing call on this thread ("" if none). */
LFOSC_API const char* lfosc_last_error(void);
LFOSC_API void lfosc_string_free(char* s);

/* --- series ------------------------------------------------------------ */

/* Normalized weight-12 eigenform coefficients tau(n)/n^{11/2}. */
LFOSC_API int lfosc_series_delta(size_t n, lfosc_series** out);
/* Sym^j of the weight-12 form, j >= 1. */
LFOSC_API int lfosc_series_sym_power(size_t n, int j, lfosc_series** out);
/* Degree-m synthetic Euler product; model is "ramanujan-uniform",
 * "sato-tate" (m = 2 only) or "lrs-extremal". */
LFOSC_API int lfosc_series_synthetic(size_t n, int m, const char* model, uint64_t seed,
                                     lfosc_series** out);
/* Genus-2 synthetic spinor coefficients; normalized != 0 selects the
 * Mobius-scaled eigenvalues lambda(n), else raw a_F(n). */
LFOSC_API int lfosc_series_spinor_synthetic(size_t n, uint64_t seed, int normalized,
                                            lfosc_series** out);
/* Ingests an eigenvalue file (`# weight=k` header, `n value` lines) and
 * yields lambda_F(n)/n^{k-3/2}; expected_weight < 0 skips the cross-check. */
LFOSC_API int lfosc_series_spinor_ingest(const char* path, int expected_weight,
                                         lfosc_series** out);

LFOSC_API int lfosc_series_limit(const lfosc_series* s, size_t* out);
LFOSC_API int lfosc_series_value(const lfosc_series* s, size_t n, double* out);
/* 1 when index n carries a value, 0 for a recorded gap. */
LFOSC_API int lfosc_series_present(const lfosc_series* s, size_t n, int* out);
/* Copies values for n = lo..hi into out[0..hi-lo]. */
LFOSC_API int lfosc_series_values(const lfosc_series* s, size_t lo, size_t hi, double* out);
LFOSC_API void lfosc_series_free(lfosc_series* s);

/* --- local parameter data ---------------------------------------------- */

LFOSC_API int lfosc_satake_synth(int m, size_t n, const char* model, uint64_t seed,
                                 lfosc_satake** out);
LFOSC_API int lfosc_satake_read(const char* path, lfosc_satake** out);
LFOSC_API int lfosc_satake_write(const lfosc_satake* s, const char* path);
LFOSC_API int lfosc_satake_degree(const lfosc_satake* s, int* out);
/* Multiplicative series with a(p^k) from the local expansions. */
LFOSC_API int lfosc_satake_assemble(const lfosc_satake* s, size_t n, lfosc_series** out);
/* Rankin-Selberg self-convolution (pairwise products with the conjugate
 * list); degree m^2. */
LFOSC_API int lfosc_satake_rankin_self(const lfosc_satake* s, lfosc_satake** out);
LFOSC_API void lfosc_satake_free(lfosc_satake* s);

/* --- presets and scanning ---------------------------------------------- */

/* "gl2-selfdual", "glm(m)", "glm-ramanujan(m)", "siegel-spinor". */
LFOSC_API int lfosc_preset_profile(const char* name, double epsilon, lfosc_profile* out);
/* Human-readable preset table; caller frees with lfosc_string_free. */
LFOSC_API int lfosc_presets_table(char** out);

/* Sign changes between consecutive nonzero entries in [x, x + ceil(x^r)]. */
LFOSC_API int lfosc_sign_changes_window(const lfosc_series* s, size_t x, double r,
                                        size_t* out);
LFOSC_API int lfosc_scan_windows(const lfosc_series* s, const lfosc_profile* profile,
                                 size_t x_min, size_t x_max, double ratio,
                                 lfosc_report** out);
LFOSC_API int lfosc_report_window_count(const lfosc_report* r, size_t* out);
LFOSC_API int lfosc_report_fraction_with_change(const lfosc_report* r, double* out);
/* *has = 0 when no suffix of all-changing windows exists. */
LFOSC_API int lfosc_report_x0(const lfosc_report* r, size_t* x0, int* has);
LFOSC_API int lfosc_report_cumulative_exponent(const lfosc_report* r, double* exponent,
                                               int* has);
LFOSC_API int lfosc_report_write_windows_csv(const lfosc_report* r, const char* path);
LFOSC_API int lfosc_report_write_cumulative_csv(const lfosc_report* r, const char* path);
LFOSC_API void lfosc_report_free(lfosc_report* r);

/* --- fitting ------------------------------------------------------------ */

/* Least squares of log|value| vs log x over >= 8 points; sup_envelope != 0
 * fits the running max of |value| instead of the pointwise values. */
LFOSC_API int lfosc_fit_growth(const double* xs, const double* values, size_t count,
                               int sup_envelope, lfosc_fit* out);
/* Fits sum_{n<=x} a(n)^2 = c*x (resp. sum a(n) = c*x) at the sample points. */
LFOSC_API int lfosc_second_moment_fit(const lfosc_series* s, const size_t* xs,
                                      size_t count, lfosc_fit* out);
LFOSC_API int lfosc_linear_moment_fit(const lfosc_series* s, const size_t* xs,
                                      size_t count, lfosc_fit* out);

/* --- experiment runner -------------------------------------------------- */

/* Runs a key=value config file with optional overrides. *run_exit receives
 * the run's exit code (0 pass or advisory, 2 failed acceptance checks);
 * config and I/O problems surface as the returned status instead. */
LFOSC_API int lfosc_run_config(const char* config_path, const char* const* overrides,
                               size_t n_overrides, int* run_exit);
/* Golden self-test; prints one line per item to stdout, *failures receives
 * the failure count. */
LFOSC_API int lfosc_selfcheck(int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LFOSC_H */
