#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/density.hpp"
#include "core/model.hpp"
#include "core/pde.hpp"
#include "core/sde.hpp"

namespace erdiff {

enum class Schedule { Fixed, Log, Sqrt };

struct GraphSection {
  Schedule schedule = Schedule::Log;
  double c = 2.0;  ///< log: c log n / n, sqrt: c / sqrt n
  double p = 1.0;  ///< fixed schedule
  bool self_loops = true;
  std::optional<std::filesystem::path> import;
  std::vector<double> K = {4.0};
};

struct SweepSection {
  std::vector<std::size_t> n = {200};
  std::vector<std::uint64_t> seeds = {1};
  std::size_t replicas = 1;  ///< graph replicas for graph-check
};

enum class InitKind { VonMises, Gaussian, Uniform };

struct InitSection {
  InitKind kind = InitKind::VonMises;
  double kappa = 1.0;  ///< von Mises concentration
  double mean = 0.0;   ///< von Mises location / Gaussian mean
  double sd = 0.5;
  bool adversarial = false;  ///< lower half of the quantiles on even sites, upper half on odd
};

struct PdeSection {
  std::size_t m = 512;
  double dt = 1e-4;
  PdeScheme scheme = PdeScheme::UpwindExplicit;
  double lo = -8.0;  ///< line box
  double hi = 8.0;
  std::size_t snapshot_every = 0;
  std::size_t refine_factor = 0;  ///< 0: no self-convergence estimate
};

struct LdpSection {
  std::size_t graph_replicas = 50;
  std::size_t path_replicas = 20;
};

struct OutputsSection {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool json = true;
  bool paths = false;  ///< simulate: write the columnar path file
  bool graph = false;  ///< export the sampled graph
};

struct ExperimentConfig {
  std::string model_name = "kuramoto";
  ModelParams model_params;
  GraphSection graph;
  SweepSection sweep;
  SimConfig sim;
  InitSection init;
  PdeSection pde;
  LdpSection ldp;
  std::size_t dictionary_size = 64;
  double gronwall_tol = 0.05;

  OutputsSection outputs;

  std::string origin = "config";  ///< file name used in error messages
  std::filesystem::path base_dir;  ///< relative paths resolve against this
  std::string import_bytes;        ///< raw bytes of the imported graph, if any
  std::vector<std::string> sections;  ///< top-level sections present in the file
  std::string source_text;   ///< raw config bytes
  std::string config_hash;   ///< sha256 of the effective configuration
  std::string input_digest;  ///< git blob sha1 of config (and imported graph) bytes
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> threads;
};

/// Parses and validates a JSON configuration. Errors are ConfigError with a
/// message of the form "<origin>:<line>: <reason> (at <pointer>)".
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides);

/// p_n for n under the schedule; ConfigError if outside (0, 1].
double schedule_p(const GraphSection& graph, std::size_t n);

/// Initial density on the PDE grid and the n deterministic initial positions.
DensityGrid initial_density(const ExperimentConfig& cfg, const ModelSpec& model);
std::vector<double> initial_positions(const ExperimentConfig& cfg, const DensityGrid& mu0, std::size_t n);

struct SweepRow {
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t graph_seed = 0;
  double s_n_T = 0.0;
  double delta_integral = 0.0;
  std::optional<double> qv;
  double w1_quenched_pde = 0.0;
  double w1_annealed_pde = 0.0;
  double w1_quenched_annealed = 0.0;
  double dbl_lower = 0.0;
  double dbl_upper = 0.0;
  double max_disc = 0.0;
  double gronwall_K = 0.0;
  double gronwall_ratio = 0.0;
  bool gronwall_pass = false;
  double w1_sqrt_s_ratio = 0.0;  ///< max over stored t of W1(quenched, annealed) / sqrt(S_n(t))
  bool w1_within_sqrt_s = true;  ///< W1 <= sqrt(S_n) (1 + 1e-9) at every stored t
  double wall_seconds = 0.0;  ///< not part of the CSV body
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< config order: n-major, then seeds
  DensityGrid pde_final;
  std::string config_hash;
  std::string input_digest;
};

/// One coupled run per (n, seed), compared with the PDE at T.
SweepResult run_sweep(const ExperimentConfig& cfg);
std::string sweep_csv(const SweepResult& sweep);

struct FitResult {
  bool fittable = false;
  std::string reason;
  double slope = 0.0;
  double intercept = 0.0;
  double band_lo = 0.0;  ///< 2.5% bootstrap quantile of the slope
  double band_hi = 0.0;  ///< 97.5% bootstrap quantile
  std::size_t points = 0;
};

/// Least squares of log(median y) on log x over the distinct x values, with a
/// bootstrap band from resampling the y values within each x group.
FitResult fit_rate(const std::vector<double>& x, const std::vector<double>& y, std::size_t bootstrap = 500,
                   std::uint64_t seed = 0);

double median(std::vector<double> values);

/// Growth constant used with each run: max(k_c(n p / log n), observed max_disc).
double gronwall_degree_constant(std::size_t n, double p, double max_disc);

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs simulate | sweep | graph-check | pde | ldp-check | compare. Exit code
/// 0 on success, 2 for configuration errors, 3 for numerical failures.
RunOutcome run_subcommand(const std::string& name, const std::filesystem::path& config_path,
                          const RunOverrides& overrides = {});

}  // namespace erdiff
