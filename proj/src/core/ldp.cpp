#include "core/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/graph.hpp"
#include "core/parallel.hpp"
#include "core/pde.hpp"
#include "core/rng.hpp"

namespace erdiff {
namespace {

constexpr std::uint64_t kGraphTag = 0x6c64702d67726170ull;
constexpr std::uint64_t kPathTag = 0x6c64702d70617468ull;

}  // namespace

LdpSequences ldp_sequences(std::size_t n, double p) {
  const double np = static_cast<double>(n) * p;
  if (!(np > 1.0) || !std::isfinite(np)) throw DomainError("n p must exceed 1");
  return {std::sqrt(std::log(np)), 1.0 / std::sqrt(np)};
}

LdpProbe make_probe(std::size_t n, double p, std::size_t graph_replicas, std::size_t path_replicas,
                    std::uint64_t seed) {
  LdpProbe probe;
  probe.n = n;
  probe.p = p;
  const auto seq = ldp_sequences(n, p);
  probe.C = seq.C;
  probe.delta = seq.delta;
  probe.graph_replicas = graph_replicas;
  probe.path_replicas = path_replicas;
  probe.seed = seed;
  return probe;
}

double exponential_moment_statistic(const std::vector<double>& qv, double C, std::size_t n) {
  if (qv.empty() || n == 0) throw DomainError("statistic needs replicas and n > 0");
  double top = -std::numeric_limits<double>::infinity();
  for (const double q : qv) top = std::max(top, C * q);
  // Sum in sorted order so the result does not depend on replica order.
  std::vector<double> terms;
  terms.reserve(qv.size());
  for (const double q : qv) terms.push_back(std::exp(C * q - top));
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (const double t : terms) sum += t;
  const double log_mean = top + std::log(sum) - std::log(static_cast<double>(qv.size()));
  return log_mean / static_cast<double>(n);
}

LdpProbe estimate_omega_frequency(const ModelSpec& model, LdpProbe probe, const SimConfig& sim,
                                  const DensityGrid& mu0) {
  if (!(model.sigma_lower > 0.0))
    throw ConfigError("exponential-moment check requires sigma bounded below by a positive constant",
                      "/model");
  if (probe.n == 0) throw ConfigError("n must be positive", "/sweep/n");
  if (probe.graph_replicas == 0 || probe.path_replicas == 0)
    throw ConfigError("replica counts must be positive", "/ldp");
  const std::vector<double> init = sample_from_density(mu0, probe.n);
  const std::size_t R_g = probe.graph_replicas, R_b = probe.path_replicas;
  probe.graphs.assign(R_g, {});

  parallel::for_each_index(
      R_g,
      [&](std::size_t g) {
        LdpGraphStat& stat = probe.graphs[g];
        stat.graph_seed = rng::derive_seed(probe.seed, kGraphTag, g);
        const ErGraph graph = sample_er(probe.n, probe.p, stat.graph_seed, probe.self_loops);
        std::vector<double> qv(R_b);
        for (std::size_t b = 0; b < R_b; ++b) {
          SimConfig cfg = sim;
          cfg.n = probe.n;
          cfg.seed = rng::derive_seed(probe.seed, kPathTag, g * R_b + b);
          qv[b] = annealed_quadratic_variation(model, graph, init, cfg);
        }
        stat.statistic = exponential_moment_statistic(qv, probe.C, probe.n);
        stat.exceeds = stat.statistic > probe.delta;
        double mean = 0.0;
        for (const double q : qv) mean += q;
        mean /= static_cast<double>(R_b);
        double var = 0.0;
        for (const double q : qv) var += (q - mean) * (q - mean);
        stat.mean_qv = mean;
        stat.sd_qv = R_b > 1 ? std::sqrt(var / static_cast<double>(R_b - 1)) : 0.0;
      },
      1);

  std::size_t hits = 0;
  for (const auto& stat : probe.graphs) hits += stat.exceeds ? 1 : 0;
  probe.omega_frequency = static_cast<double>(hits) / static_cast<double>(R_g);
  return probe;
}

}  // namespace erdiff
