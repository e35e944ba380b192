#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace erdiff {

/// Kernel of the form Gamma(x, y) = sum_r left_r(x) * right_r(y). Lets
/// complete-graph and neighbour sums run in O(rank) per particle after one
/// O(n) pass over the right factors. Rank 0 encodes Gamma == 0.
struct SeparableKernel {
  std::size_t rank = 0;
  std::function<void(double, std::span<double>)> left;
  std::function<void(double, std::span<double>)> right;
};

/// Drift F, interaction Gamma and diffusion sigma of the particle system,
/// with the declared constants the bounds and integrators rely on.
struct ModelSpec {
  std::string name = "custom";
  std::function<double(double)> drift;
  std::function<double(double, double)> interaction;
  std::function<double(double)> diffusion;
  Geometry geometry = Geometry::line();

  double lipschitz_drift = 0.0;
  double lipschitz_interaction = 0.0;
  double lipschitz_diffusion = 0.0;
  double interaction_sup = 0.0;
  double sigma_lower = 0.0;
  double sigma_upper = 0.0;
  bool sigma_constant = false;

  std::optional<SeparableKernel> separable;
};

using ModelParams = std::map<std::string, double>;

enum class BuiltinModel { Kuramoto, LinearAttract, ConstantSigmaFree };

BuiltinModel parse_builtin_name(const std::string& name);

/// kuramoto: K, sigma. linear_attract: a, sigma, optional K (default 1).
/// constant_sigma_free: sigma. Missing or non-finite values throw ConfigError.
ModelSpec builtin_model(BuiltinModel which, const ModelParams& params);
ModelSpec builtin_model(const std::string& name, const ModelParams& params);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Violation {
  std::string check;
  double x = 0.0;
  std::optional<double> y;
  double observed = 0.0;
  double declared = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Samples the declared bounds at n_samples points of box (box x box for the
/// kernel). Deterministic in seed; violations are returned, never thrown.
ValidationReport validate_model(const ModelSpec& spec, std::size_t n_samples, Interval box,
                                std::uint64_t seed);

/// Scales Gamma (and its declared bounds) by factor.
ModelSpec scale_interaction(const ModelSpec& spec, double factor);

}  // namespace erdiff
