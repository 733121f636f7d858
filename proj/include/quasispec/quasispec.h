/* quasispec: quasiperiodic Schroedinger cocycles with singular potentials. */
#ifndef QUASISPEC_QUASISPEC_H
#define QUASISPEC_QUASISPEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(QS_BUILDING_LIBRARY)
#define QS_API __attribute__((visibility("default")))
#else
#define QS_API
#endif

typedef enum qs_status {
  QS_OK = 0,
  QS_ERR_INVALID_ARGUMENT,
  QS_ERR_INSUFFICIENT_DEPTH,
  QS_ERR_PRECISION_EXHAUSTED,
  QS_ERR_SCALE_UNCERTIFIED,
  QS_ERR_SINGULAR_HIT,
  QS_ERR_THETA_IN_SINGULAR_TUBE,
  QS_ERR_QUADRATURE_NONCONVERGENT,
  QS_ERR_UNKNOWN_NAME,
  QS_ERR_EPSILON_BELOW_RESOLUTION,
  QS_ERR_LADDER_TOO_SHALLOW,
  QS_ERR_SUBSEQUENCE_EMPTY,
  QS_ERR_LYAPUNOV_MISSING,
  QS_ERR_CAP_BOUND,
  QS_ERR_CONFIG,
  QS_ERR_IO,
  QS_ERR_INTERNAL
} qs_status;

typedef enum qs_matrix_kind { QS_KIND_A = 0, QS_KIND_D = 1, QS_KIND_F = 2 } qs_matrix_kind;
typedef enum qs_lyapunov_method { QS_PHASE_AVERAGE = 0, QS_BIRKHOFF = 1 } qs_lyapunov_method;

typedef struct qs_frequency qs_frequency;
typedef struct qs_potential qs_potential;
typedef struct qs_probe qs_probe;
typedef struct qs_experiment qs_experiment;

typedef void (*qs_log_fn)(const char* line, void* user);

QS_API const char* qs_version(void);
QS_API const char* qs_status_name(qs_status status);
/* Message of the last failure on the calling thread; "" after success. */
QS_API const char* qs_last_error(void);
/* Step or site attached to the last failure, -1 when none. */
QS_API int64_t qs_last_error_index(void);
/* Releases strings returned through char** out-parameters. */
QS_API void qs_string_free(char* s);

/* Frequencies. Coefficients a_1, a_2, ... as decimal strings. */
QS_API qs_status qs_frequency_from_coefficients(const char* const* coefficients, size_t count, qs_frequency** out);
/* "golden", "sqrt2-1", "quadratic:a,b,c,d" or a decimal literal. */
QS_API qs_status qs_frequency_from_real(const char* text, size_t depth, int precision_bits, qs_frequency** out);
QS_API qs_status qs_frequency_liouville(double c, size_t depth, unsigned cap_bits, qs_frequency** out);
QS_API void qs_frequency_free(qs_frequency* fm);
QS_API size_t qs_frequency_depth(const qs_frequency* fm);
QS_API qs_status qs_frequency_log_q(const qs_frequency* fm, size_t n, double* out);
QS_API qs_status qs_frequency_q(const qs_frequency* fm, size_t n, char** out);
QS_API qs_status qs_frequency_p(const qs_frequency* fm, size_t n, char** out);
QS_API qs_status qs_frequency_to_json(const qs_frequency* fm, char** out);
/* Running sup of ln q_{n+1}/q_n over n_min..n_max. */
QS_API qs_status qs_frequency_beta(const qs_frequency* fm, size_t n_min, size_t n_max, double* out);

/* Potentials. */
QS_API qs_status qs_potential_builtin(const char* name, int has_param, double param, qs_potential** out);
QS_API qs_status qs_potential_from_json(const char* json, qs_potential** out);
QS_API void qs_potential_free(qs_potential* spec);
QS_API qs_status qs_potential_eval(const qs_potential* spec, double theta, double* f, double* g, double* v,
                                   int* singular);
QS_API qs_status qs_potential_mean_log_f(const qs_potential* spec, double* out);
QS_API qs_status qs_potential_normalize(const qs_potential* spec, qs_potential** out);
QS_API qs_status qs_potential_to_json(const qs_potential* spec, char** out);

/* The 53-bit dyadic phase drawn for "random:<seed>". */
QS_API double qs_random_theta(uint64_t seed);

/* Cocycle. Phases are taken as exact binary rationals. */
QS_API qs_status qs_lyapunov(const qs_potential* spec, const qs_frequency* fm, double E, long n,
                             qs_lyapunov_method method, int phases, qs_matrix_kind kind, double* value,
                             double* stderr_out);
QS_API qs_status qs_delta_index(const qs_frequency* fm, const qs_potential* spec, double theta, size_t depth,
                                double eps, char** json_out);
QS_API qs_status qs_gordon_check(const qs_potential* spec, const qs_frequency* fm, double theta, double E,
                                 size_t scale_n, double eps, double L, const double phi[2], char** json_out);

/* Spectral probes. */
QS_API qs_status qs_probe_create(const qs_potential* spec, const qs_frequency* fm, double theta, long N,
                                 qs_probe** out);
QS_API qs_status qs_probe_from_measure(const double* locations, const double* weights, size_t count,
                                       qs_probe** out);
QS_API void qs_probe_free(qs_probe* probe);
QS_API size_t qs_probe_size(const qs_probe* probe);
QS_API qs_status qs_probe_level(const qs_probe* probe, size_t k, double* eigenvalue, double* weight);
QS_API qs_status qs_probe_borel(const qs_probe* probe, double E, double eps, double* re, double* im);
QS_API qs_status qs_probe_dimension(const qs_probe* probe, double E, double eps_hi, double ratio, int rungs,
                                    double* gamma_star, double* packing_slope);

/* Batch experiments. On a config error *violations receives a JSON array of
   {kind, name, message}. */
QS_API qs_status qs_experiment_parse(const char* text, const char* task, qs_experiment** out, char** violations);
QS_API qs_status qs_experiment_run(const qs_experiment* exp, int workers, qs_log_fn log, void* user,
                                   int* exit_code, char** report);
QS_API void qs_experiment_free(qs_experiment* exp);

#ifdef __cplusplus
}
#endif

#endif /* QUASISPEC_QUASISPEC_H */
