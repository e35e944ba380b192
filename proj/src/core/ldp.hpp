#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "core/density.hpp"
#include "core/model.hpp"
#include "core/sde.hpp"

namespace erdiff {

struct LdpSequences {
  double C = 0.0;      ///< sqrt(log(n p))
  double delta = 0.0;  ///< 1 / sqrt(n p)
};

/// Tilt constant and threshold of the exponential-moment event. Throws
/// DomainError when n p <= 1.
LdpSequences ldp_sequences(std::size_t n, double p);

struct LdpGraphStat {
  std::uint64_t graph_seed = 0;
  double statistic = 0.0;  ///< (1/n) log((1/R_b) sum_b exp(C qv_b))
  bool exceeds = false;
  double mean_qv = 0.0;
  double sd_qv = 0.0;
};

struct LdpProbe {
  std::size_t n = 0;
  double p = 1.0;
  double C = 0.0;
  double delta = 0.0;
  std::size_t graph_replicas = 50;
  std::size_t path_replicas = 20;
  std::uint64_t seed = 0;  ///< master seed
  bool self_loops = true;

  std::vector<LdpGraphStat> graphs;
  double omega_frequency = 0.0;
};

/// Probe for (n, p) with the default sequences filled in.
LdpProbe make_probe(std::size_t n, double p, std::size_t graph_replicas, std::size_t path_replicas,
                    std::uint64_t seed);

/// (1/n) log of the mean of exp(C q) over the replicas, by log-sum-exp.
double exponential_moment_statistic(const std::vector<double>& qv, double C, std::size_t n);

/// For each graph replica, simulates path_replicas annealed paths from the
/// stratified sample of mu0 and evaluates the graph's quadratic variation
/// along them. sim.seed is ignored; seeds derive from probe.seed. Requires
/// sigma_lower > 0.
LdpProbe estimate_omega_frequency(const ModelSpec& model, LdpProbe probe, const SimConfig& sim,
                                  const DensityGrid& mu0);

}  // namespace erdiff
