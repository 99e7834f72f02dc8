/*
 * C interface to the biphoton source/memory design toolkit.
 *
 * Conventions:
 *   - Every fallible call returns bp_status; BP_OK is zero.
 *   - On failure, bp_last_error() returns a message for the calling thread,
 *     valid until the next call into the library from that thread.
 *   - Opaque handles are created by bp_*_create/load/compute functions and
 *     released with the matching bp_*_free, which accepts NULL.
 *   - Strings returned through char** are heap allocated; release them with
 *     bp_string_free.
 */
#ifndef BIPHOTON_BIPHOTON_H
#define BIPHOTON_BIPHOTON_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef BIPHOTON_BUILDING_LIBRARY
#    define BP_API __declspec(dllexport)
#  else
#    define BP_API __declspec(dllimport)
#  endif
#else
#  define BP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bp_status {
  BP_OK = 0,
  BP_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum, buffer too small */
  BP_ERR_PARAMETER = 2,
  BP_ERR_DOMAIN_MISMATCH = 3,
  BP_ERR_ZERO_NORM = 4,
  BP_ERR_NUMERICAL = 5,
  BP_ERR_NOT_CONVERGED = 6,
  BP_ERR_UNDEFINED = 7,
  BP_ERR_PRECONDITION = 8,
  BP_ERR_IO = 9,
  BP_ERR_PARSE = 10,
  BP_ERR_INTERNAL = 11
} bp_status;

BP_API const char* bp_version(void);
BP_API const char* bp_status_string(bp_status status);
BP_API const char* bp_last_error(void);
BP_API void bp_string_free(char* s);

/* ---------------------------------------------------------------- signal model */

typedef struct bp_grid {
  size_t n_points;
  double lo;
  double hi;
} bp_grid;

typedef struct bp_pulse_train {
  double sigma_p;
  double period;
  int side_pulses;
  double amplitude;
} bp_pulse_train;

typedef struct bp_filter {
  double gamma;
  double center_frequency;
} bp_filter;

typedef struct bp_gate {
  double width;
  double center;
} bp_gate;

typedef enum bp_fwhm_kind {
  BP_FWHM_PUMP_INTENSITY_BANDWIDTH = 0,
  BP_FWHM_FILTER_AMPLITUDE_BANDWIDTH = 1,
  BP_FWHM_DURATION = 2
} bp_fwhm_kind;

BP_API bp_status bp_parameter_from_fwhm(bp_fwhm_kind kind, double fwhm, double* out);
BP_API bp_status bp_fwhm_from_parameter(bp_fwhm_kind kind, double parameter, double* out);

/* Sample an envelope on `grid` into `out` (grid->n_points doubles). */
BP_API bp_status bp_sample_pump_train(const bp_pulse_train* train, const bp_grid* grid, double* out,
                                      int* window_truncated);
BP_API bp_status bp_sample_filter_time(const bp_filter* filter, const bp_grid* grid, double* out);
BP_API bp_status bp_sample_gate(const bp_gate* gate, const bp_grid* grid, double* out);

/* ---------------------------------------------------------------- joint amplitude */

typedef struct bp_joint_amplitude bp_joint_amplitude;

typedef enum bp_domain { BP_DOMAIN_TIME = 0, BP_DOMAIN_FREQUENCY = 1 } bp_domain;

/* Gate may be NULL for an ungated amplitude. */
BP_API bp_status bp_jta_assemble(const bp_pulse_train* train, const bp_filter* filter, const bp_gate* gate,
                                 const bp_grid* idler_grid, const bp_grid* signal_grid,
                                 bp_joint_amplitude** out);
BP_API bp_status bp_jta_to_frequency(const bp_joint_amplitude* jta, bp_joint_amplitude** out);
BP_API void bp_jta_free(bp_joint_amplitude* jta);
BP_API bp_status bp_jta_info(const bp_joint_amplitude* jta, bp_domain* domain, bp_grid* idler_axis,
                             bp_grid* signal_axis);
BP_API bp_status bp_jta_norm_squared(const bp_joint_amplitude* jta, double* out);
/* Row-major (idler, signal) copy; re/im arrays hold idler*signal doubles each. */
BP_API bp_status bp_jta_values(const bp_joint_amplitude* jta, double* re, double* im, size_t capacity);
BP_API bp_status bp_jta_gating_loss(const bp_joint_amplitude* gated, const bp_joint_amplitude* reference,
                                    double* out);
BP_API bp_status bp_jta_write_csv(const bp_joint_amplitude* jta, const char* path);

/* ---------------------------------------------------------------- marginal spectrum */

typedef struct bp_spectrum bp_spectrum;

BP_API bp_status bp_marginal_spectrum(double pump_intensity_fwhm_ghz, double filter_amplitude_fwhm_ghz,
                                      double filter_center_ghz, const bp_grid* grid, bp_spectrum** out);
BP_API bp_status bp_marginal_fwhm_closed_form(double pump_intensity_fwhm_ghz,
                                              double filter_amplitude_fwhm_ghz, double* out);
BP_API void bp_spectrum_free(bp_spectrum* s);
BP_API bp_status bp_spectrum_fwhm(const bp_spectrum* s, double* out);
BP_API bp_status bp_spectrum_write_csv(const bp_spectrum* s, const char* path);

/* ---------------------------------------------------------------- Schmidt decomposition */

typedef struct bp_schmidt bp_schmidt;

BP_API bp_status bp_schmidt_decompose(const bp_joint_amplitude* jta, size_t k_max, bp_schmidt** out);
BP_API void bp_schmidt_free(bp_schmidt* s);
BP_API bp_status bp_schmidt_purity(const bp_schmidt* s, double* purity, double* schmidt_number);
/* Copies up to `capacity` normalised coefficients; *count receives the total. */
BP_API bp_status bp_schmidt_lambdas(const bp_schmidt* s, double* out, size_t capacity, size_t* count);
/* Fundamental signal mode (memory kernel): n = signal axis length. */
BP_API bp_status bp_schmidt_kernel(const bp_schmidt* s, double* re, double* im, size_t capacity, int* tie);
BP_API bp_status bp_schmidt_to_json(const bp_schmidt* s, char** json);
BP_API bp_status bp_schmidt_write_modes_csv(const bp_schmidt* s, const char* path);

/* ---------------------------------------------------------------- memory interface */

typedef enum bp_kernel_source { BP_KERNEL_GATED_SELF = 0, BP_KERNEL_UNGATED = 1 } bp_kernel_source;

typedef struct bp_numerics {
  int side_pulses;
  double samples_per_scale;
  size_t min_grid_points;
  size_t max_grid_points;
} bp_numerics;

typedef struct bp_design_point {
  double t_hat;
  double gamma_hat;
  int gates_enabled;
  bp_kernel_source kernel;
  bp_numerics numerics;
} bp_design_point;

#define BP_LAMBDA_HEAD 8

typedef struct bp_efficiency {
  double eta_in;
  double purity;
  double gating_loss;
  double reference_norm;
  double leading_weight;
  double lambda_head[BP_LAMBDA_HEAD];
  size_t n_lambda;
  size_t idler_points;
  size_t signal_points;
  int kernel_tie;
} bp_efficiency;

/* Fills defaults: M = 3, 16 samples per scale, 64..1024 points, gated kernel. */
BP_API void bp_numerics_init(bp_numerics* n);
BP_API void bp_design_point_init(bp_design_point* p);
BP_API bp_status bp_read_in_efficiency(const bp_design_point* p, bp_efficiency* out);
BP_API bp_status bp_total_memory_efficiency(double eta_in, double eta_ret, double* out);

typedef struct bp_efficiency_map bp_efficiency_map;

typedef struct bp_sweep_request {
  const double* t_values;
  size_t n_t;
  const double* gamma_values;
  size_t n_gamma;
  bp_numerics numerics;
  bp_kernel_source kernel;
  unsigned threads; /* 0 = hardware concurrency */
} bp_sweep_request;

BP_API bp_status bp_linspace(double lo, double hi, size_t n, double* out);
BP_API bp_status bp_sweep(const bp_sweep_request* req, bp_efficiency_map** out);
BP_API void bp_efficiency_map_free(bp_efficiency_map* m);
BP_API bp_status bp_efficiency_map_shape(const bp_efficiency_map* m, size_t* n_t, size_t* n_gamma,
                                         size_t* n_failures);
BP_API bp_status bp_efficiency_map_eta(const bp_efficiency_map* m, size_t t_index, size_t gamma_index,
                                       double* out);
BP_API bp_status bp_efficiency_map_optimum(const bp_efficiency_map* m, size_t t_index, double* gamma_opt,
                                           double* eta_opt);
BP_API bp_status bp_efficiency_map_write_csv(const bp_efficiency_map* m, const char* path);
BP_API bp_status bp_efficiency_map_summary_json(const bp_efficiency_map* m, char** json);

/* ---------------------------------------------------------------- counting analysis */

typedef struct bp_count_record {
  double pump_power_mw;
  double c_T;
  double c_H;
  double c_V;
  double c_H_given_T;
  double c_V_given_T;
  double c_HV_given_T;
  double acc_s_given_T;
  double integration_time_s;
} bp_count_record;

typedef struct bp_optical_path {
  double transmission;
  double transmission_err;
  double detector_efficiency;
  double detector_efficiency_err;
} bp_optical_path;

typedef struct bp_measurement {
  double value;
  double error;
} bp_measurement;

typedef struct bp_net_coincidences {
  double rate;
  double error;
  int floored;
  int precondition_violated;
} bp_net_coincidences;

typedef struct bp_linear_fit {
  double slope;
  double intercept;
  double slope_err;
  double intercept_err;
} bp_linear_fit;

typedef struct bp_counts_table bp_counts_table;

BP_API bp_status bp_counts_load_csv(const char* path, bp_counts_table** out);
BP_API void bp_counts_free(bp_counts_table* t);
BP_API size_t bp_counts_size(const bp_counts_table* t);
BP_API bp_status bp_counts_record(const bp_counts_table* t, size_t index, bp_count_record* out);
BP_API size_t bp_counts_issue_count(const bp_counts_table* t);
/* Line number and message of a skipped row; message valid while t lives. */
BP_API bp_status bp_counts_issue(const bp_counts_table* t, size_t index, size_t* line, const char** message);
BP_API size_t bp_counts_warning_count(const bp_counts_table* t);
BP_API const char* bp_counts_warning(const bp_counts_table* t, size_t index);

BP_API bp_status bp_subtract_accidentals(const bp_count_record* r, bp_net_coincidences* out);
BP_API bp_status bp_heralding_efficiency(const bp_count_record* r, const bp_optical_path* path,
                                         bp_measurement* out);
BP_API bp_status bp_heralded_g2(const bp_count_record* r, bp_measurement* out);
/* Channel names: c_T, c_H, c_V, c_H_plus_V, c_H_given_T, c_V_given_T,
 * c_s_given_T, c_HV_given_T, acc_s_given_T, net_s_given_T. Residuals
 * (optional, may be NULL) receive one value per record. */
BP_API bp_status bp_linear_rate_fit(const bp_counts_table* t, const char* channel, bp_linear_fit* out,
                                    double* residuals, size_t capacity);
BP_API bp_status bp_mode_match_ratio(bp_measurement eta_hsp, bp_measurement eta_coh, bp_measurement* out);

/* ---------------------------------------------------------------- spectral fit */

typedef struct bp_sweep_points bp_sweep_points;

typedef enum bp_filter_line { BP_FILTER_LINE_INTENSITY = 0, BP_FILTER_LINE_AMPLITUDE = 1 } bp_filter_line;

typedef struct bp_spectral_fit {
  double delta_t_ns;
  double delta_t_err_ns;
  double delta_nu_ghz;
  double delta_nu_err_ghz;
  double centre_ghz;
  double centre_err_ghz;
  double scale;
  double scale_err;
  double rss;
  int iterations;
  int converged;
  int below_resolution;
  double resolution_bound_ghz;
} bp_spectral_fit;

BP_API bp_status bp_sweep_points_load_csv(const char* path, bp_sweep_points** out);
BP_API bp_status bp_sweep_points_create(const double* detuning_ghz, const double* normalized, size_t n,
                                        bp_sweep_points** out);
BP_API void bp_sweep_points_free(bp_sweep_points* p);
BP_API size_t bp_sweep_points_size(const bp_sweep_points* p);
BP_API size_t bp_sweep_points_issue_count(const bp_sweep_points* p);
BP_API bp_status bp_sweep_points_issue(const bp_sweep_points* p, size_t index, size_t* line,
                                       const char** message);
/* Returns BP_ERR_NOT_CONVERGED, with `out` filled, when the iteration bound is
 * reached. Residuals (optional) receive one value per point. */
BP_API bp_status bp_fit_hsp_bandwidth(const bp_sweep_points* p, const bp_filter* signal_filter,
                                      bp_filter_line line, bp_spectral_fit* out, double* residuals,
                                      size_t capacity);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BIPHOTON_BIPHOTON_H */
