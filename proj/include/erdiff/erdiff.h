#ifndef ERDIFF_ERDIFF_H
#define ERDIFF_ERDIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(ERDIFF_BUILDING_LIBRARY)
#define ERD_API __attribute__((visibility("default")))
#else
#define ERD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure erd_last_error() holds a
 * thread-local message until the next failing call on the same thread. */
typedef enum erd_status {
  ERD_OK = 0,
  ERD_ERR_ARGUMENT = 1,  /* null pointer, bad index, size mismatch */
  ERD_ERR_CONFIG = 2,
  ERD_ERR_NUMERIC = 3,   /* integration failure */
  ERD_ERR_DOMAIN = 4,
  ERD_ERR_IO = 5,
  ERD_ERR_INTERNAL = 6
} erd_status;

typedef struct erd_model erd_model;
typedef struct erd_graph erd_graph;
typedef struct erd_density erd_density;
typedef struct erd_run erd_run;

ERD_API const char* erd_last_error(void);
ERD_API const char* erd_version(void);

/* ---- model ---- */

/* Builtin model by name ("kuramoto", "linear_attract", "constant_sigma_free")
 * with count named parameters. */
ERD_API erd_status erd_model_builtin(const char* name, const char* const* keys, const double* values,
                                     size_t count, erd_model** out);
ERD_API erd_status erd_model_scale_interaction(const erd_model* model, double factor, erd_model** out);
/* Number of violated declared bounds on samples points of [lo, hi]. */
ERD_API erd_status erd_model_validate(const erd_model* model, size_t samples, double lo, double hi,
                                      uint64_t seed, size_t* violations);
/* Period of the circle, 0 on the line. */
ERD_API double erd_model_period(const erd_model* model);
ERD_API void erd_model_free(erd_model* model);

/* ---- graph ---- */

ERD_API erd_status erd_graph_sample(size_t n, double p, uint64_t seed, int self_loops, erd_graph** out);
/* Text edge list, or binary when the path ends in ".bin". */
ERD_API erd_status erd_graph_load(const char* path, erd_graph** out);
ERD_API erd_status erd_graph_save(const erd_graph* graph, const char* path);
ERD_API size_t erd_graph_n(const erd_graph* graph);
ERD_API double erd_graph_p(const erd_graph* graph);
ERD_API size_t erd_graph_edge_count(const erd_graph* graph);
/* row_disc and col_disc need n entries each; either may be null. */
ERD_API erd_status erd_graph_degree_report(const erd_graph* graph, double* row_disc, double* col_disc,
                                           double* max_disc);
ERD_API erd_status erd_graph_condition_holds(const erd_graph* graph, double K, int* holds);
ERD_API void erd_graph_free(erd_graph* graph);

ERD_API erd_status erd_bernstein_bound(double K, double p, size_t n, double* out);
/* Pass INFINITY for C = +inf. */
ERD_API erd_status erd_k_c(double C, double* out);

/* ---- densities and the limiting equation ---- */

/* Cell averages on [lo, hi] (line) or [0, period) (circle, period > 0);
 * values are normalized to unit mass. */
ERD_API erd_status erd_density_create(double period, double lo, double hi, const double* values, size_t m,
                                      erd_density** out);
ERD_API size_t erd_density_cells(const erd_density* density);
ERD_API double erd_density_time(const erd_density* density);
ERD_API double erd_density_mass(const erd_density* density);
ERD_API erd_status erd_density_values(const erd_density* density, double* out, size_t m);
ERD_API void erd_density_free(erd_density* density);

typedef enum erd_pde_scheme { ERD_PDE_UPWIND_EXPLICIT = 0, ERD_PDE_UPWIND_SEMI_IMPLICIT = 1 } erd_pde_scheme;

typedef struct erd_pde_stats {
  size_t steps;
  double max_mass_error;
  double max_boundary_mass;
  size_t clip_events;
} erd_pde_stats;

/* Solution at T on the grid of mu0. stats may be null. */
ERD_API erd_status erd_pde_solve(const erd_model* model, const erd_density* mu0, double dt, double T,
                                 erd_pde_scheme scheme, erd_density** out, erd_pde_stats* stats);
ERD_API erd_status erd_sample_from_density(const erd_density* density, size_t n, double* out);

/* ---- coupled particle systems ---- */

typedef enum erd_qv_mode { ERD_QV_AUTO = 0, ERD_QV_REQUIRED = 1, ERD_QV_OFF = 2 } erd_qv_mode;

typedef struct erd_sim_config {
  double dt;
  double T;
  uint64_t seed;
  size_t store_stride;
  erd_qv_mode qv;
} erd_sim_config;

ERD_API erd_sim_config erd_sim_config_default(void);
ERD_API erd_status erd_simulate(const erd_model* model, const erd_graph* graph, const double* init, size_t n,
                                const erd_sim_config* cfg, erd_run** out);
ERD_API size_t erd_run_stored(const erd_run* run);
ERD_API size_t erd_run_n(const erd_run* run);
ERD_API erd_status erd_run_times(const erd_run* run, double* out);
/* n positions of the quenched (theta) or annealed (theta_bar) system at a stored row. */
ERD_API erd_status erd_run_theta(const erd_run* run, size_t row, double* out);
ERD_API erd_status erd_run_theta_bar(const erd_run* run, size_t row, double* out);
ERD_API erd_status erd_run_s_n(const erd_run* run, double* out);
ERD_API erd_status erd_run_delta_path(const erd_run* run, double* out);
ERD_API double erd_run_delta_integral(const erd_run* run);
/* has_qv is set to 0 when the quadratic variation was not computed. */
ERD_API erd_status erd_run_qv(const erd_run* run, double* qv, int* has_qv);
ERD_API erd_status erd_run_gronwall(const erd_run* run, const erd_model* model, double K, double tol, int* passes,
                                    double* worst_ratio);
ERD_API void erd_run_free(erd_run* run);

/* ---- distances ---- */

/* period > 0 selects the circle. */
ERD_API erd_status erd_w1(const double* a, size_t na, const double* b, size_t nb, double period, double* out);
ERD_API erd_status erd_dbl_sandwich(const double* a, size_t na, const double* b, size_t nb, double period,
                                    size_t dictionary_size, uint64_t seed, double* lower, double* upper);
ERD_API erd_status erd_w1_to_density(const double* a, size_t n, const erd_density* density, double* out);

/* ---- exponential-moment probe ---- */

ERD_API erd_status erd_ldp_sequences(size_t n, double p, double* C, double* delta);
/* statistics may be null or hold graph_replicas entries. */
ERD_API erd_status erd_ldp_estimate(const erd_model* model, size_t n, double p, size_t graph_replicas,
                                    size_t path_replicas, uint64_t seed, const erd_sim_config* sim,
                                    const erd_density* mu0, double* omega_frequency, double* statistics);

/* ---- command-line runner ---- */

typedef struct erd_overrides {
  int has_seed;
  uint64_t seed;
  const char* out_dir; /* null keeps the configured directory */
  size_t threads;      /* 0 keeps the default */
} erd_overrides;

/* Runs a subcommand and returns its exit code (0, 2 config, 3 numerical).
 * erd_last_message() holds the summary or error text afterwards. */
ERD_API int erd_run_subcommand(const char* name, const char* config_path, const erd_overrides* overrides);
ERD_API const char* erd_last_message(void);

#ifdef __cplusplus
}
#endif

#endif
