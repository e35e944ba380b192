#include "core/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace erdiff {
namespace {

constexpr std::size_t kGrain = 256;

// Complete-graph and neighbour sums of Gamma(x_i, x_j) for one configuration.
class KernelSums {
 public:
  KernelSums(const ModelSpec& model, std::size_t n) : model_(model), n_(n) {
    if (model.separable) {
      rank_ = model.separable->rank;
      left_.assign(n * rank_, 0.0);
      right_.assign(n * rank_, 0.0);
      totals_.assign(rank_, 0.0);
    }
  }

  /// Caches the separable factors for state x.
  void load(std::span<const double> x) {
    state_ = x;
    if (!separable() || rank_ == 0) return;
    const auto& sep = *model_.separable;
    parallel::for_each_index(
        n_,
        [&](std::size_t i) {
          sep.left(x[i], std::span<double>(left_.data() + i * rank_, rank_));
          sep.right(x[i], std::span<double>(right_.data() + i * rank_, rank_));
        },
        kGrain);
    std::fill(totals_.begin(), totals_.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t q = 0; q < rank_; ++q) totals_[q] += right_[j * rank_ + q];
    }
  }

  void full(std::span<double> out) const {
    if (separable()) {
      if (rank_ == 0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      parallel::for_each_index(
          n_,
          [&](std::size_t i) {
            double acc = 0.0;
            for (std::size_t q = 0; q < rank_; ++q) acc += left_[i * rank_ + q] * totals_[q];
            out[i] = acc;
          },
          kGrain);
      return;
    }
    const auto& gamma = model_.interaction;
    parallel::for_each_index(
        n_,
        [&](std::size_t i) {
          const double xi = state_[i];
          double acc = 0.0;
          for (std::size_t j = 0; j < n_; ++j) acc += gamma(xi, state_[j]);
          out[i] = acc;
        },
        16);
  }

  void neighbors(const ErGraph& graph, std::span<double> out) const {
    if (separable()) {
      if (rank_ == 0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      if (rank_ == 2) {
        parallel::for_each_index(
            n_,
            [&](std::size_t i) {
              double s0 = 0.0;
              double s1 = 0.0;
              for (const auto j : graph.out_neighbors(i)) {
                s0 += right_[2 * j];
                s1 += right_[2 * j + 1];
              }
              out[i] = left_[2 * i] * s0 + left_[2 * i + 1] * s1;
            },
            kGrain);
        return;
      }
      parallel::for_each_index(
          n_,
          [&](std::size_t i) {
            double acc = 0.0;
            for (std::size_t q = 0; q < rank_; ++q) {
              double s = 0.0;
              for (const auto j : graph.out_neighbors(i)) s += right_[j * rank_ + q];
              acc += left_[i * rank_ + q] * s;
            }
            out[i] = acc;
          },
          kGrain);
      return;
    }
    const auto& gamma = model_.interaction;
    parallel::for_each_index(
        n_,
        [&](std::size_t i) {
          const double xi = state_[i];
          double acc = 0.0;
          for (const auto j : graph.out_neighbors(i)) acc += gamma(xi, state_[j]);
          out[i] = acc;
        },
        64);
  }

 private:
  bool separable() const { return model_.separable.has_value(); }

  const ModelSpec& model_;
  std::size_t n_;
  std::size_t rank_ = 0;
  std::span<const double> state_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> totals_;
};

// xi_{i,j} / p == 1 for every entry: the graph drift is the complete-graph drift.
bool trivially_mean_field(const ErGraph& graph) { return graph.p() == 1.0 && graph.is_complete(); }

bool interaction_free(const ModelSpec& model) { return model.separable && model.separable->rank == 0; }

bool wants_qv(const ModelSpec& model, QvMode mode) {
  switch (mode) {
    case QvMode::Off:
      return false;
    case QvMode::Auto:
      return model.sigma_lower > 0.0;
    case QvMode::Required:
      if (!(model.sigma_lower > 0.0)) {
        throw ConfigError("quadratic variation requires sigma bounded below by a positive constant",
                          "/model/params/sigma");
      }
      return true;
  }
  return false;
}

void check_config(const SimConfig& cfg, std::size_t n, std::size_t init_size) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive", "/sim/dt");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ConfigError("T must be positive", "/sim/T");
  if (cfg.dt > cfg.T) throw ConfigError("dt must not exceed T", "/sim/dt");
  if (cfg.store_stride == 0) throw ConfigError("store stride must be positive", "/sim/stride");
  if (init_size != n) {
    throw ConfigError("initial condition has " + std::to_string(init_size) + " entries, graph has " +
                      std::to_string(n));
  }
  if (cfg.n != 0 && cfg.n != n) {
    throw ConfigError("configured n = " + std::to_string(cfg.n) + " does not match graph size " +
                      std::to_string(n), "/sim/n");
  }
}

inline double euler_step(double x, double drift, double sigma, double h, double sqrt_h, double z) {
  return x + drift * h + sigma * sqrt_h * z;
}

void check_finite(std::span<const double> x, std::size_t step, const char* which) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw IntegrationError(std::string("non-finite ") + which + " state at step " +
                                 std::to_string(step) + ", particle " + std::to_string(i),
                             step, i);
    }
  }
}

double sum_of(std::span<const double> v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc;
}

}  // namespace

std::vector<double> time_steps(double dt, double T) {
  const double ratio = T / dt;
  const double rounded = std::round(ratio);
  std::size_t count;
  if (rounded >= 1.0 && std::fabs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) {
    count = static_cast<std::size_t>(rounded);
  } else {
    count = static_cast<std::size_t>(std::ceil(ratio));
  }
  count = std::max<std::size_t>(count, 1);
  std::vector<double> h(count, dt);
  h.back() = T - static_cast<double>(count - 1) * dt;
  return h;
}

SimResult simulate_coupled(const ModelSpec& model, const ErGraph& graph, std::span<const double> init,
                           const SimConfig& cfg) {
  const std::size_t n = graph.n();
  check_config(cfg, n, init.size());
  const bool with_qv = wants_qv(model, cfg.qv);
  const bool mean_field = trivially_mean_field(graph);
  const Geometry geom = model.geometry;
  const double p = graph.p();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double np = static_cast<double>(n) * p;
  const auto steps = time_steps(cfg.dt, cfg.T);

  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = geom.wrap(init[i]);
  std::vector<double> theta_bar = theta;
  check_finite(theta, 0, "initial");

  SimResult result;
  CoupledPaths& paths = result.paths;
  CouplingDiagnostics& diag = result.diagnostics;
  paths.geometry = geom;
  paths.n = n;
  paths.init.assign(init.begin(), init.end());

  std::vector<double> full_a(n), nbr_a(n), full_q(n), nbr_q(n), work(n), run_max(n, 0.0);
  KernelSums sums_a(model, n);
  KernelSums sums_q(model, n);

  auto evaluate_sums = [&]() {
    sums_a.load(theta_bar);
    sums_a.full(full_a);
    sums_q.load(theta);
    if (mean_field) {
      std::copy(full_a.begin(), full_a.end(), nbr_a.begin());
      sums_q.full(full_q);
      std::copy(full_q.begin(), full_q.end(), nbr_q.begin());
      return;
    }
    sums_a.neighbors(graph, nbr_a);
    sums_q.neighbors(graph, nbr_q);
    if (with_qv) sums_q.full(full_q);
  };
  // (1/n) sum_i Delta_i on annealed states.
  auto mean_delta = [&]() {
    parallel::for_each_index(
        n,
        [&](std::size_t i) {
          const double d = (nbr_a[i] / p - full_a[i]) * inv_n;
          work[i] = d * d;
        },
        kGrain);
    return sum_of(work) * inv_n;
  };
  // sum_i c_i^2 on quenched states.
  auto qv_rate = [&]() {
    parallel::for_each_index(
        n,
        [&](std::size_t i) {
          const double c = (nbr_q[i] / p - full_q[i]) * inv_n / model.diffusion(theta[i]);
          work[i] = c * c;
        },
        kGrain);
    return sum_of(work);
  };
  auto store = [&](std::size_t step, double t, double s_n, double delta) {
    paths.times.push_back(t);
    paths.steps.push_back(step);
    paths.theta.insert(paths.theta.end(), theta.begin(), theta.end());
    paths.theta_bar.insert(paths.theta_bar.end(), theta_bar.begin(), theta_bar.end());
    diag.times.push_back(t);
    diag.s_n.push_back(s_n);
    diag.delta_path.push_back(delta);
    diag.stored_step.push_back(step);
  };

  diag.step_size = steps;
  diag.step_delta.resize(steps.size());
  double qv = 0.0;
  double s_n = 0.0;
  double t = 0.0;

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double h = steps[k];
    const double sqrt_h = std::sqrt(h);
    evaluate_sums();
    const double delta = mean_delta();
    diag.step_delta[k] = delta;
    diag.delta_integral += h * delta;
    if (with_qv) qv += h * qv_rate();
    if (k == 0) store(0, 0.0, 0.0, delta);

    parallel::for_each_index(
        n,
        [&](std::size_t i) {
          const double z = rng::normal(cfg.seed, rng::Domain::Noise, i, k);
          const double q_drift = model.drift(theta[i]) + nbr_q[i] / np;
          const double a_drift = model.drift(theta_bar[i]) + full_a[i] / static_cast<double>(n);
          theta[i] = geom.wrap(euler_step(theta[i], q_drift, model.diffusion(theta[i]), h, sqrt_h, z));
          theta_bar[i] =
              geom.wrap(euler_step(theta_bar[i], a_drift, model.diffusion(theta_bar[i]), h, sqrt_h, z));
          const double gap = geom.distance(theta[i], theta_bar[i]);
          run_max[i] = std::max(run_max[i], gap * gap);
        },
        kGrain);
    check_finite(theta, k + 1, "quenched");
    check_finite(theta_bar, k + 1, "annealed");
    s_n = sum_of(run_max) * inv_n;
    t = (k + 1 == steps.size()) ? cfg.T : t + h;

    const bool last = k + 1 == steps.size();
    if (last || (k + 1) % cfg.store_stride == 0) {
      double delta_here = 0.0;
      if (last) {
        evaluate_sums();
        delta_here = mean_delta();
      }
      store(k + 1, t, s_n, delta_here);
    }
  }
  // Interior stored points take Delta at their own step from the per-step record.
  for (std::size_t r = 0; r + 1 < diag.stored_step.size(); ++r) {
    diag.delta_path[r] = diag.step_delta[diag.stored_step[r]];
  }
  if (with_qv) diag.qv = qv;
  return result;
}

double gronwall_rate(const ModelSpec& model, double K) {
  return 2.0 * model.lipschitz_drift + 1.0 + (4.0 + 4.0 * K) * model.lipschitz_interaction;
}

GronwallReport gronwall_check(const CouplingDiagnostics& diag, const ModelSpec& model, double K,
                              double tol) {
  const double rate = gronwall_rate(model, K);
  GronwallReport report;
  report.bound.assign(diag.times.size(), 0.0);
  double integral = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k <= diag.step_size.size() && next < diag.stored_step.size(); ++k) {
    while (next < diag.stored_step.size() && diag.stored_step[next] == k) {
      report.bound[next] = integral;
      ++next;
    }
    if (k < diag.step_size.size()) {
      const double h = diag.step_size[k];
      integral = std::exp(rate * h) * (integral + h * diag.step_delta[k]);
    }
  }
  for (std::size_t r = 0; r < diag.times.size(); ++r) {
    const double lhs = diag.s_n[r];
    const double rhs = report.bound[r];
    double ratio = 0.0;
    if (rhs > 0.0) {
      ratio = lhs / rhs;
    } else if (lhs > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_time = diag.times[r];
    }
    if (lhs > (1.0 + tol) * rhs) report.passes = false;
  }
  return report;
}

double s_n_at(const CouplingDiagnostics& diag, double t) {
  if (diag.times.empty()) throw DomainError("no stored times");
  const double horizon = diag.times.back();
  const double slack = 1e-12 * std::max(1.0, horizon);
  if (t < -slack || t > horizon + slack) throw DomainError("time outside the simulated horizon");
  std::size_t row = 0;
  for (std::size_t r = 0; r < diag.times.size(); ++r) {
    if (diag.times[r] <= t + slack) row = r;
  }
  return diag.s_n[row];
}

double qv_density(const ModelSpec& model, const ErGraph& graph, std::span<const double> state) {
  const std::size_t n = graph.n();
  if (state.size() != n) throw ConfigError("state size does not match graph");
  if (!(model.sigma_lower > 0.0)) {
    throw ConfigError("quadratic variation requires sigma bounded below by a positive constant",
                      "/model/params/sigma");
  }
  if (trivially_mean_field(graph) || interaction_free(model)) return 0.0;
  KernelSums sums(model, n);
  std::vector<double> full(n), nbr(n);
  sums.load(state);
  sums.full(full);
  sums.neighbors(graph, nbr);
  const double inv_n = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = (nbr[i] / graph.p() - full[i]) * inv_n / model.diffusion(state[i]);
    acc += c * c;
  }
  return acc;
}

double quadratic_variation_along(const ModelSpec& model, const ErGraph& graph,
                                 const CoupledPaths& paths) {
  double qv = 0.0;
  for (std::size_t r = 0; r + 1 < paths.stored(); ++r) {
    qv += (paths.times[r + 1] - paths.times[r]) * qv_density(model, graph, paths.theta_at(r));
  }
  return qv;
}

double annealed_quadratic_variation(const ModelSpec& model, const ErGraph& graph,
                                    std::span<const double> init, const SimConfig& cfg) {
  const std::size_t n = graph.n();
  check_config(cfg, n, init.size());
  if (!(model.sigma_lower > 0.0)) {
    throw ConfigError("LDP diagnostics require sigma bounded below by a positive constant",
                      "/model/params/sigma");
  }
  // c_i vanishes identically in both cases, whatever the states.
  if (trivially_mean_field(graph) || interaction_free(model)) return 0.0;
  const Geometry geom = model.geometry;
  const double p = graph.p();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto steps = time_steps(cfg.dt, cfg.T);

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = geom.wrap(init[i]);
  std::vector<double> full(n), nbr(n), work(n);
  KernelSums sums(model, n);
  double qv = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double h = steps[k];
    const double sqrt_h = std::sqrt(h);
    sums.load(x);
    sums.full(full);
    sums.neighbors(graph, nbr);
    parallel::for_each_index(
        n,
        [&](std::size_t i) {
          const double c = (nbr[i] / p - full[i]) * inv_n / model.diffusion(x[i]);
          work[i] = c * c;
        },
        kGrain);
    qv += h * sum_of(work);
    parallel::for_each_index(
        n,
        [&](std::size_t i) {
          const double z = rng::normal(cfg.seed, rng::Domain::Noise, i, k);
          const double drift = model.drift(x[i]) + full[i] / static_cast<double>(n);
          x[i] = geom.wrap(euler_step(x[i], drift, model.diffusion(x[i]), h, sqrt_h, z));
        },
        kGrain);
    check_finite(x, k + 1, "annealed");
  }
  return qv;
}

}  // namespace erdiff
