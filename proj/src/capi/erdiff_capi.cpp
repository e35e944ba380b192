#include "erdiff/erdiff.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/graph.hpp"
#include "core/io.hpp"
#include "core/ldp.hpp"
#include "core/measure.hpp"
#include "core/model.hpp"
#include "core/pde.hpp"
#include "core/sde.hpp"

struct erd_model {
  erdiff::ModelSpec spec;
};
struct erd_graph {
  erdiff::ErGraph graph;
};
struct erd_density {
  erdiff::DensityGrid grid;
};
struct erd_run {
  erdiff::SimResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_message;

erd_status fail(erd_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

// Maps the library's exception types onto status codes.
template <class F>
erd_status guarded(F&& body) {
  try {
    body();
    return ERD_OK;
  } catch (const erdiff::ConfigError& e) {
    return fail(ERD_ERR_CONFIG, e.path().empty() ? e.what() : std::string(e.what()) + " (at " + e.path() + ")");
  } catch (const erdiff::IntegrationError& e) {
    return fail(ERD_ERR_NUMERIC, std::string(e.what()) + " (step " + std::to_string(e.step()) + ", index " +
                                     std::to_string(e.index()) + ")");
  } catch (const erdiff::DomainError& e) {
    return fail(ERD_ERR_DOMAIN, e.what());
  } catch (const erdiff::IoError& e) {
    return fail(ERD_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ERD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ERD_ERR_INTERNAL, e.what());
  }
}

erd_status null_arg(const char* name) { return fail(ERD_ERR_ARGUMENT, std::string(name) + " must not be null"); }

erdiff::Geometry geometry_for(double period) {
  return period > 0.0 ? erdiff::Geometry::circle(period) : erdiff::Geometry::line();
}

erdiff::SimConfig to_sim(const erd_sim_config& c) {
  erdiff::SimConfig s;
  s.dt = c.dt;
  s.T = c.T;
  s.seed = c.seed;
  s.store_stride = c.store_stride;
  switch (c.qv) {
    case ERD_QV_REQUIRED:
      s.qv = erdiff::QvMode::Required;
      break;
    case ERD_QV_OFF:
      s.qv = erdiff::QvMode::Off;
      break;
    default:
      s.qv = erdiff::QvMode::Auto;
  }
  return s;
}

}  // namespace

extern "C" {

const char* erd_last_error(void) { return g_last_error.c_str(); }
const char* erd_last_message(void) { return g_last_message.c_str(); }
const char* erd_version(void) { return "0.1.0"; }

erd_status erd_model_builtin(const char* name, const char* const* keys, const double* values, size_t count,
                             erd_model** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  if (count > 0 && (!keys || !values)) return null_arg("keys/values");
  return guarded([&] {
    erdiff::ModelParams params;
    for (size_t k = 0; k < count; ++k) {
      if (!keys[k]) throw erdiff::ConfigError("parameter name must not be null");
      params[keys[k]] = values[k];
    }
    *out = new erd_model{erdiff::builtin_model(std::string(name), params)};
  });
}

erd_status erd_model_scale_interaction(const erd_model* model, double factor, erd_model** out) {
  if (!model) return null_arg("model");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new erd_model{erdiff::scale_interaction(model->spec, factor)}; });
}

erd_status erd_model_validate(const erd_model* model, size_t samples, double lo, double hi, uint64_t seed,
                              size_t* violations) {
  if (!model) return null_arg("model");
  if (!violations) return null_arg("violations");
  return guarded([&] {
    *violations = erdiff::validate_model(model->spec, samples, {lo, hi}, seed).violations.size();
  });
}

double erd_model_period(const erd_model* model) {
  return model && model->spec.geometry.is_circle() ? model->spec.geometry.period : 0.0;
}

void erd_model_free(erd_model* model) { delete model; }

erd_status erd_graph_sample(size_t n, double p, uint64_t seed, int self_loops, erd_graph** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new erd_graph{erdiff::sample_er(n, p, seed, self_loops != 0)}; });
}

erd_status erd_graph_load(const char* path, erd_graph** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new erd_graph{erdiff::io::read_graph(path)}; });
}

erd_status erd_graph_save(const erd_graph* graph, const char* path) {
  if (!graph) return null_arg("graph");
  if (!path) return null_arg("path");
  return guarded([&] { erdiff::io::write_graph(path, graph->graph); });
}

size_t erd_graph_n(const erd_graph* graph) { return graph ? graph->graph.n() : 0; }
double erd_graph_p(const erd_graph* graph) { return graph ? graph->graph.p() : 0.0; }
size_t erd_graph_edge_count(const erd_graph* graph) { return graph ? graph->graph.edge_count() : 0; }

erd_status erd_graph_degree_report(const erd_graph* graph, double* row_disc, double* col_disc, double* max_disc) {
  if (!graph) return null_arg("graph");
  return guarded([&] {
    const auto rep = erdiff::degree_report(graph->graph);
    if (row_disc) std::copy(rep.row_disc.begin(), rep.row_disc.end(), row_disc);
    if (col_disc) std::copy(rep.col_disc.begin(), rep.col_disc.end(), col_disc);
    if (max_disc) *max_disc = rep.max_disc;
  });
}

erd_status erd_graph_condition_holds(const erd_graph* graph, double K, int* holds) {
  if (!graph) return null_arg("graph");
  if (!holds) return null_arg("holds");
  return guarded([&] { *holds = erdiff::degree_condition_holds(graph->graph, K) ? 1 : 0; });
}

void erd_graph_free(erd_graph* graph) { delete graph; }

erd_status erd_bernstein_bound(double K, double p, size_t n, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = erdiff::bernstein_bound(K, p, n); });
}

erd_status erd_k_c(double C, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = erdiff::k_c(C); });
}

erd_status erd_density_create(double period, double lo, double hi, const double* values, size_t m,
                              erd_density** out) {
  if (!values) return null_arg("values");
  if (!out) return null_arg("out");
  if (m == 0) return fail(ERD_ERR_ARGUMENT, "density needs at least one cell");
  return guarded([&] {
    erdiff::DensityGrid grid;
    grid.geometry = geometry_for(period);
    grid.lo = period > 0.0 ? 0.0 : lo;
    grid.hi = period > 0.0 ? period : hi;
    if (!(grid.hi > grid.lo)) throw erdiff::ConfigError("density box must satisfy lo < hi");
    grid.values.assign(values, values + m);
    for (const double v : grid.values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw erdiff::DomainError("density values must be finite and nonnegative");
    grid.normalize();
    *out = new erd_density{std::move(grid)};
  });
}

size_t erd_density_cells(const erd_density* density) { return density ? density->grid.cells() : 0; }
double erd_density_time(const erd_density* density) { return density ? density->grid.time : 0.0; }
double erd_density_mass(const erd_density* density) { return density ? density->grid.mass() : 0.0; }

erd_status erd_density_values(const erd_density* density, double* out, size_t m) {
  if (!density) return null_arg("density");
  if (!out) return null_arg("out");
  if (m != density->grid.cells()) return fail(ERD_ERR_ARGUMENT, "buffer size does not match cell count");
  std::copy(density->grid.values.begin(), density->grid.values.end(), out);
  return ERD_OK;
}

void erd_density_free(erd_density* density) { delete density; }

erd_status erd_pde_solve(const erd_model* model, const erd_density* mu0, double dt, double T, erd_pde_scheme scheme,
                         erd_density** out, erd_pde_stats* stats) {
  if (!model) return null_arg("model");
  if (!mu0) return null_arg("mu0");
  if (!out) return null_arg("out");
  return guarded([&] {
    erdiff::PdeConfig cfg;
    cfg.m = mu0->grid.cells();
    cfg.dt = dt;
    cfg.T = T;
    cfg.scheme = scheme == ERD_PDE_UPWIND_SEMI_IMPLICIT ? erdiff::PdeScheme::UpwindSemiImplicit
                                                        : erdiff::PdeScheme::UpwindExplicit;
    const auto sol = erdiff::solve_mckean_vlasov(model->spec, mu0->grid, cfg);
    if (stats) *stats = {sol.steps, sol.max_mass_error, sol.max_boundary_mass, sol.clip_events};
    *out = new erd_density{sol.final()};
  });
}

erd_status erd_sample_from_density(const erd_density* density, size_t n, double* out) {
  if (!density) return null_arg("density");
  if (!out && n > 0) return null_arg("out");
  return guarded([&] {
    const auto samples = erdiff::sample_from_density(density->grid, n);
    std::copy(samples.begin(), samples.end(), out);
  });
}

erd_sim_config erd_sim_config_default(void) {
  erd_sim_config c;
  c.dt = 1e-3;
  c.T = 1.0;
  c.seed = 0;
  c.store_stride = 1;
  c.qv = ERD_QV_AUTO;
  return c;
}

erd_status erd_simulate(const erd_model* model, const erd_graph* graph, const double* init, size_t n,
                        const erd_sim_config* cfg, erd_run** out) {
  if (!model) return null_arg("model");
  if (!graph) return null_arg("graph");
  if (!init) return null_arg("init");
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    erdiff::SimConfig sc = to_sim(*cfg);
    sc.n = n;
    *out = new erd_run{erdiff::simulate_coupled(model->spec, graph->graph, {init, n}, sc)};
  });
}

size_t erd_run_stored(const erd_run* run) { return run ? run->result.paths.stored() : 0; }
size_t erd_run_n(const erd_run* run) { return run ? run->result.paths.n : 0; }

erd_status erd_run_times(const erd_run* run, double* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  std::copy(run->result.paths.times.begin(), run->result.paths.times.end(), out);
  return ERD_OK;
}

erd_status erd_run_theta(const erd_run* run, size_t row, double* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  if (row >= run->result.paths.stored()) return fail(ERD_ERR_ARGUMENT, "row out of range");
  const auto r = run->result.paths.theta_at(row);
  std::copy(r.begin(), r.end(), out);
  return ERD_OK;
}

erd_status erd_run_theta_bar(const erd_run* run, size_t row, double* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  if (row >= run->result.paths.stored()) return fail(ERD_ERR_ARGUMENT, "row out of range");
  const auto r = run->result.paths.theta_bar_at(row);
  std::copy(r.begin(), r.end(), out);
  return ERD_OK;
}

erd_status erd_run_s_n(const erd_run* run, double* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  std::copy(run->result.diagnostics.s_n.begin(), run->result.diagnostics.s_n.end(), out);
  return ERD_OK;
}

erd_status erd_run_delta_path(const erd_run* run, double* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  std::copy(run->result.diagnostics.delta_path.begin(), run->result.diagnostics.delta_path.end(), out);
  return ERD_OK;
}

double erd_run_delta_integral(const erd_run* run) { return run ? run->result.diagnostics.delta_integral : 0.0; }

erd_status erd_run_qv(const erd_run* run, double* qv, int* has_qv) {
  if (!run) return null_arg("run");
  if (!qv || !has_qv) return null_arg("qv/has_qv");
  const auto& q = run->result.diagnostics.qv;
  *has_qv = q ? 1 : 0;
  *qv = q ? *q : 0.0;
  return ERD_OK;
}

erd_status erd_run_gronwall(const erd_run* run, const erd_model* model, double K, double tol, int* passes,
                            double* worst_ratio) {
  if (!run) return null_arg("run");
  if (!model) return null_arg("model");
  return guarded([&] {
    const auto rep = erdiff::gronwall_check(run->result.diagnostics, model->spec, K, tol);
    if (passes) *passes = rep.passes ? 1 : 0;
    if (worst_ratio) *worst_ratio = rep.worst_ratio;
  });
}

void erd_run_free(erd_run* run) { delete run; }

erd_status erd_w1(const double* a, size_t na, const double* b, size_t nb, double period, double* out) {
  if ((!a && na) || (!b && nb)) return null_arg("samples");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto g = geometry_for(period);
    *out = erdiff::w1(erdiff::EmpiricalMeasure({a, a + na}, g), erdiff::EmpiricalMeasure({b, b + nb}, g));
  });
}

erd_status erd_dbl_sandwich(const double* a, size_t na, const double* b, size_t nb, double period,
                            size_t dictionary_size, uint64_t seed, double* lower, double* upper) {
  if ((!a && na) || (!b && nb)) return null_arg("samples");
  if (!lower || !upper) return null_arg("lower/upper");
  return guarded([&] {
    const auto g = geometry_for(period);
    const auto s = erdiff::dbl_sandwich(erdiff::EmpiricalMeasure({a, a + na}, g),
                                        erdiff::EmpiricalMeasure({b, b + nb}, g), dictionary_size, seed);
    *lower = s.lower;
    *upper = s.upper;
  });
}

erd_status erd_w1_to_density(const double* a, size_t n, const erd_density* density, double* out) {
  if (!a && n) return null_arg("samples");
  if (!density) return null_arg("density");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = erdiff::w1_to_density(erdiff::EmpiricalMeasure({a, a + n}, density->grid.geometry), density->grid);
  });
}

erd_status erd_ldp_sequences(size_t n, double p, double* C, double* delta) {
  if (!C || !delta) return null_arg("C/delta");
  return guarded([&] {
    const auto s = erdiff::ldp_sequences(n, p);
    *C = s.C;
    *delta = s.delta;
  });
}

erd_status erd_ldp_estimate(const erd_model* model, size_t n, double p, size_t graph_replicas, size_t path_replicas,
                            uint64_t seed, const erd_sim_config* sim, const erd_density* mu0,
                            double* omega_frequency, double* statistics) {
  if (!model) return null_arg("model");
  if (!sim) return null_arg("sim");
  if (!mu0) return null_arg("mu0");
  if (!omega_frequency) return null_arg("omega_frequency");
  return guarded([&] {
    auto probe = erdiff::make_probe(n, p, graph_replicas, path_replicas, seed);
    probe = erdiff::estimate_omega_frequency(model->spec, probe, to_sim(*sim), mu0->grid);
    *omega_frequency = probe.omega_frequency;
    if (statistics)
      for (size_t g = 0; g < probe.graphs.size(); ++g) statistics[g] = probe.graphs[g].statistic;
  });
}

int erd_run_subcommand(const char* name, const char* config_path, const erd_overrides* overrides) {
  if (!name || !config_path) {
    g_last_message = "subcommand name and config path are required";
    g_last_error = g_last_message;
    return 2;
  }
  try {
    erdiff::RunOverrides ov;
    if (overrides) {
      if (overrides->has_seed) ov.seed = overrides->seed;
      if (overrides->out_dir) ov.out = std::filesystem::path(overrides->out_dir);
      if (overrides->threads > 0) ov.threads = overrides->threads;
    }
    const auto outcome = erdiff::run_subcommand(name, config_path, ov);
    g_last_message = outcome.message;
    if (outcome.exit_code != 0) g_last_error = outcome.message;
    return outcome.exit_code;
  } catch (const std::exception& e) {
    g_last_message = e.what();
    g_last_error = g_last_message;
    return 3;
  }
}

}  // extern "C"
