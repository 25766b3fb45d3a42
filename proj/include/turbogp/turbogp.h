/*
 * turbogp C API.
 *
 * Every function returns a tgp_status. On failure the message for the
 * calling thread is available from tgp_last_error() until the next call on
 * that thread. Objects are opaque handles released with the matching
 * *_destroy function; destroying NULL is a no-op. Handles are immutable
 * after creation and may be shared across threads for reading.
 *
 * Grid arrays are N*N doubles, row-major, x1 the slow index:
 * value(i1, i2) = data[i1 * N + i2] at x = (i1, i2) * 2 pi / N.
 */
#ifndef TURBOGP_H
#define TURBOGP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TURBOGP_BUILDING_SHARED)
#    define TGP_API __declspec(dllexport)
#  else
#    define TGP_API __declspec(dllimport)
#  endif
#else
#  define TGP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tgp_status {
    TGP_OK = 0,
    TGP_ERR_INVALID_ARGUMENT = 1, /* bad parameter or precondition */
    TGP_ERR_NUMERICAL = 2,        /* factorization or other numerical failure */
    TGP_ERR_IO = 3,               /* file could not be read or written */
    TGP_ERR_INTERNAL = 4          /* anything else */
} tgp_status;

typedef enum tgp_kernel_family {
    TGP_KERNEL_CHT = 0,
    TGP_KERNEL_RBF = 1,
    TGP_KERNEL_MATERN = 2
} tgp_kernel_family;

typedef enum tgp_truth_kind {
    TGP_TRUTH_GAUSSIAN = 0,
    TGP_TRUTH_VORTEX = 1
} tgp_truth_kind;

typedef enum tgp_field_kind {
    TGP_FIELD_REAL = 0,
    TGP_FIELD_SPECTRAL = 1
} tgp_field_kind;

typedef struct tgp_field_s tgp_field;
typedef struct tgp_kernel_s tgp_kernel;
typedef struct tgp_posterior_s tgp_posterior;

typedef struct tgp_kernel_spec {
    int family; /* tgp_kernel_family */
    double alpha;
    double length_scale;
    double nu;
    double variance;
} tgp_kernel_spec;

typedef struct tgp_vortex_params {
    int vortex_count;
    double radius_min;
    double radius_max;
    double amplitude_min;
    double amplitude_max;
    double sign_balance;
} tgp_vortex_params;

typedef struct tgp_observations {
    size_t count;
    const int* i1;
    const int* i2;
    const double* values;
    double noise_variance;
} tgp_observations;

typedef struct tgp_shell {
    int k;
    double shell_avg_power;
    double shell_sum_power;
    int mode_count;
} tgp_shell;

typedef struct tgp_power_law {
    double exponent;
    double exponent_stderr;
    double intercept;
    int k_min;
    int k_max;
    double r_squared;
} tgp_power_law;

typedef struct tgp_validation_row {
    double alpha;
    tgp_power_law shell_sum;
    tgp_power_law mode_avg;
} tgp_validation_row;

#define TGP_MAX_CANDIDATES 8

typedef struct tgp_trial_config {
    int grid_n;
    double alpha_true;
    const tgp_kernel_spec* candidates; /* baselines get their length scale tuned */
    size_t candidate_count;            /* 1 .. TGP_MAX_CANDIDATES */
    int m;
    double noise_ratio;
    uint64_t master_seed;
    int truth_kind; /* tgp_truth_kind */
    tgp_vortex_params vortex;
    int jobs; /* worker threads, 0 = hardware concurrency */
} tgp_trial_config;

typedef struct tgp_kernel_outcome {
    tgp_kernel_spec spec; /* spec used after tuning */
    double relative_error;
    double rmse;
} tgp_kernel_outcome;

typedef struct tgp_trial_result {
    uint64_t seed;
    double improvement_pct;
    int winner; /* index into kernels */
    size_t kernel_count;
    tgp_kernel_outcome kernels[TGP_MAX_CANDIDATES];
} tgp_trial_result;

typedef struct tgp_sweep_point {
    double axis_value;
    double mean_improvement;
    double std_improvement;
    double win_rate;
    int trial_count;
} tgp_sweep_point;

/* ---- library --------------------------------------------------------- */

TGP_API const char* tgp_version(void);
TGP_API const char* tgp_last_error(void);

/* Library defaults: CHT alpha 1.5, RBF length 0.5, Matern nu 1.5 with
 * length 0.5, unit variance; 12 vortices with radii 0.2..0.6. */
TGP_API tgp_kernel_spec tgp_default_kernel_spec(int family);
TGP_API tgp_vortex_params tgp_default_vortex_params(void);

/* ---- fields ---------------------------------------------------------- */

TGP_API tgp_status tgp_field_create(int n, const double* values, tgp_field** out);
/* Raw Gaussian sample with the spec's normalized density. */
TGP_API tgp_status tgp_field_sample(const tgp_kernel_spec* spec, int n, uint64_t seed, tgp_field** out);
/* Unit-variance CHT truth; scale_factor may be NULL. */
TGP_API tgp_status tgp_field_cht_truth(double alpha, int n, uint64_t seed, tgp_field** out, double* scale_factor);
TGP_API tgp_status tgp_field_vortex_truth(const tgp_vortex_params* params, int n, uint64_t seed, tgp_field** out);
TGP_API void tgp_field_destroy(tgp_field* field);

TGP_API int tgp_field_n(const tgp_field* field);
/* Copies N*N values into out. */
TGP_API tgp_status tgp_field_values(const tgp_field* field, double* out, size_t capacity);

/* Velocity (u1, u2) with curl(u) = w. */
TGP_API tgp_status tgp_field_biot_savart(const tgp_field* vorticity, tgp_field** u1, tgp_field** u2);

/* Writes N/2 - 1 shells into out; *count receives the shell count. */
TGP_API tgp_status tgp_field_spectrum(const tgp_field* field, tgp_shell* out, size_t capacity, size_t* count);
TGP_API tgp_status tgp_fit_power_law(const tgp_shell* shells, size_t count, int k_min, int k_max, int use_sum,
                                     tgp_power_law* out);

/* Field dump: JSON header + little-endian float64 payload. seed/alpha may
 * be NULL. kind selects a physical or interleaved spectral payload. */
TGP_API tgp_status tgp_field_save(const tgp_field* field, const char* header_path, const char* payload_path,
                                  int kind, const uint64_t* seed, const double* alpha);
/* Loads either kind of dump as a physical field. */
TGP_API tgp_status tgp_field_load(const char* header_path, const char* payload_path, tgp_field** out);

/* ---- kernels --------------------------------------------------------- */

TGP_API tgp_status tgp_kernel_build(const tgp_kernel_spec* spec, int n, tgp_kernel** out);
TGP_API void tgp_kernel_destroy(tgp_kernel* kernel);
TGP_API tgp_status tgp_kernel_value(const tgp_kernel* kernel, int a, int b, double* out);
TGP_API tgp_status tgp_direct_kernel_sum(const tgp_kernel_spec* spec, double dx1, double dx2, int truncation,
                                         double* out);
TGP_API tgp_status tgp_check_admissible(double alpha, double gamma, int* admissible);
TGP_API tgp_status tgp_forcing_to_alpha(double beta, double gamma, double* alpha);

/* ---- inference ------------------------------------------------------- */

/* Draws m distinct grid points and noisy values. Arrays hold m entries. */
TGP_API tgp_status tgp_observe(const tgp_field* truth, int m, double noise_ratio, uint64_t seed, int* i1, int* i2,
                               double* values, double* noise_variance);

TGP_API tgp_status tgp_posterior_fit(const tgp_kernel* kernel, const tgp_observations* obs, tgp_posterior** out);
TGP_API void tgp_posterior_destroy(tgp_posterior* post);
TGP_API tgp_status tgp_posterior_mean(const tgp_posterior* post, double* out, size_t capacity);
TGP_API tgp_status tgp_posterior_variance(const tgp_posterior* post, double* out, size_t capacity);
TGP_API tgp_status tgp_posterior_interval(const tgp_posterior* post, int i1, int i2, double level, double* lo,
                                          double* hi);
TGP_API tgp_status tgp_posterior_energy_variance(const tgp_posterior* post, double* out);
TGP_API tgp_status tgp_posterior_log_likelihood(const tgp_posterior* post, double* out);
TGP_API tgp_status tgp_posterior_clamped(const tgp_posterior* post, int* out);

/* Index of the candidate with the largest marginal likelihood. */
TGP_API tgp_status tgp_select_hyperparameter(const tgp_kernel_spec* candidates, size_t count,
                                             const tgp_observations* obs, int n, size_t* best);

/* Greedy max-variance design; out_i1/out_i2 receive `count` points. */
TGP_API tgp_status tgp_place_sensors(const tgp_kernel* kernel, const tgp_observations* obs, const int* cand_i1,
                                     const int* cand_i2, size_t candidate_count, int count, int* out_i1,
                                     int* out_i2);

/* ---- experiments ----------------------------------------------------- */

/* Runs `trials` trials; trial t uses a seed split from master_seed. */
TGP_API tgp_status tgp_run_trials(const tgp_trial_config* config, int trials, tgp_trial_result* out);
TGP_API tgp_status tgp_sweep_alpha(const tgp_trial_config* config, const double* alphas, size_t count, int trials,
                                   tgp_sweep_point* out);
TGP_API tgp_status tgp_sweep_density(const tgp_trial_config* config, const int* m_values, size_t count, int trials,
                                     tgp_sweep_point* out);
/* k_min/k_max = 0 select the default window [4, N/4]. */
TGP_API tgp_status tgp_spectral_validation(const double* alphas, size_t count, int n, int seeds_per_alpha,
                                           uint64_t master_seed, int k_min, int k_max, tgp_validation_row* out);

#ifdef __cplusplus
}
#endif

#endif /* TURBOGP_H */
