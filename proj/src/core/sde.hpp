#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/geometry.hpp"
#include "core/graph.hpp"
#include "core/model.hpp"

namespace erdiff {

enum class QvMode {
  Auto,      ///< computed when sigma has a positive lower bound
  Required,  ///< configuration error unless sigma has a positive lower bound
  Off,
};

struct SimConfig {
  double dt = 1e-3;
  double T = 1.0;
  std::uint64_t seed = 0;
  std::size_t store_stride = 1;
  std::size_t n = 0;
  QvMode qv = QvMode::Auto;
};

/// Step sizes of the time grid: ceil(T/dt) steps, the last one shrunk so the
/// grid ends exactly at T.
std::vector<double> time_steps(double dt, double T);

/// Quenched and annealed trajectories on the stored time grid, row-major
/// (stored time x particle).
struct CoupledPaths {
  Geometry geometry;
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<std::size_t> steps;  ///< step index of each stored time
  std::vector<double> theta;
  std::vector<double> theta_bar;
  std::vector<double> init;

  std::size_t stored() const { return times.size(); }
  std::span<const double> theta_at(std::size_t row) const { return {theta.data() + row * n, n}; }
  std::span<const double> theta_bar_at(std::size_t row) const {
    return {theta_bar.data() + row * n, n};
  }
};

struct CouplingDiagnostics {
  std::vector<double> times;       ///< stored times
  std::vector<double> s_n;         ///< (1/n) sum_i sup_{s<=t} gap_i(s)^2
  std::vector<double> delta_path;  ///< (1/n) sum_i Delta_i(t)
  double delta_integral = 0.0;
  std::optional<double> qv;

  /// Per-step record used by the Gronwall comparison.
  std::vector<double> step_size;
  std::vector<double> step_delta;  ///< (1/n) sum_i Delta_i at the left end of each step
  std::vector<std::size_t> stored_step;
};

struct SimResult {
  CoupledPaths paths;
  CouplingDiagnostics diagnostics;
};

/// Euler-Maruyama for the quenched (graph) and annealed (complete graph)
/// systems driven by the same Gaussian increments, keyed by (seed, i, step).
/// Diagnostics accumulate at every step.
SimResult simulate_coupled(const ModelSpec& model, const ErGraph& graph, std::span<const double> init,
                           const SimConfig& cfg);

struct GronwallReport {
  bool passes = true;
  double worst_ratio = 0.0;  ///< max over stored t of S_n(t) / bound(t)
  double worst_time = 0.0;
  std::vector<double> bound;  ///< integral_0^t exp(G(t-s)) (1/n) sum Delta_i(s) ds per stored t
};

/// Growth constant 2 L_F + 1 + (4 + 4K) L_Gamma.
double gronwall_rate(const ModelSpec& model, double K);

/// Checks S_n(t) <= (1 + tol) * bound(t) at every stored time.
GronwallReport gronwall_check(const CouplingDiagnostics& diag, const ModelSpec& model, double K,
                              double tol);

/// S_n at the largest stored time not after t.
double s_n_at(const CouplingDiagnostics& diag, double t);

/// Simulates only the annealed system and integrates sum_i c_i^2 dt with the
/// graph weights evaluated on annealed states. Requires sigma_lower > 0.
double annealed_quadratic_variation(const ModelSpec& model, const ErGraph& graph,
                                    std::span<const double> init, const SimConfig& cfg);

/// sum_i c_i(state)^2 for a single configuration.
double qv_density(const ModelSpec& model, const ErGraph& graph, std::span<const double> state);

/// Left-endpoint integral of qv_density along stored quenched states (stride
/// 1 paths give the same quadrature as the integrator).
double quadratic_variation_along(const ModelSpec& model, const ErGraph& graph,
                                 const CoupledPaths& paths);

}  // namespace erdiff
