#include "core/model.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace erdiff {
namespace {

double require_param(const ModelParams& params, const std::string& key, const std::string& model) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw ConfigError("model '" + model + "' requires parameter '" + key + "'",
                      "/model/params/" + key);
  }
  if (!std::isfinite(it->second)) {
    throw ConfigError("model parameter '" + key + "' must be finite", "/model/params/" + key);
  }
  return it->second;
}

double optional_param(const ModelParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!std::isfinite(it->second)) {
    throw ConfigError("model parameter '" + key + "' must be finite", "/model/params/" + key);
  }
  return it->second;
}

void set_constant_sigma(ModelSpec& spec, double sigma) {
  if (sigma < 0.0) throw ConfigError("noise level sigma must be nonnegative", "/model/params/sigma");
  spec.diffusion = [sigma](double) { return sigma; };
  spec.sigma_lower = sigma;
  spec.sigma_upper = sigma;
  spec.sigma_constant = true;
  spec.lipschitz_diffusion = 0.0;
}

bool exceeds(double observed, double bound) {
  return observed > bound * (1.0 + 1e-9) + 1e-12;
}

}  // namespace

BuiltinModel parse_builtin_name(const std::string& name) {
  if (name == "kuramoto") return BuiltinModel::Kuramoto;
  if (name == "linear_attract") return BuiltinModel::LinearAttract;
  if (name == "constant_sigma_free") return BuiltinModel::ConstantSigmaFree;
  throw ConfigError("unknown model '" + name + "'", "/model/name");
}

ModelSpec builtin_model(const std::string& name, const ModelParams& params) {
  return builtin_model(parse_builtin_name(name), params);
}

ModelSpec builtin_model(BuiltinModel which, const ModelParams& params) {
  ModelSpec spec;
  switch (which) {
    case BuiltinModel::Kuramoto: {
      const double coupling = require_param(params, "K", "kuramoto");
      const double sigma = require_param(params, "sigma", "kuramoto");
      spec.name = "kuramoto";
      spec.geometry = Geometry::circle(2.0 * std::numbers::pi);
      spec.drift = [](double) { return 0.0; };
      spec.interaction = [coupling](double x, double y) { return coupling * std::sin(y - x); };
      spec.interaction_sup = std::fabs(coupling);
      spec.lipschitz_interaction = std::fabs(coupling);
      // K sin(y - x) = K cos(x) sin(y) - K sin(x) cos(y)
      spec.separable = SeparableKernel{
          2,
          [coupling](double x, std::span<double> out) {
            out[0] = coupling * std::cos(x);
            out[1] = -coupling * std::sin(x);
          },
          [](double y, std::span<double> out) {
            out[0] = std::sin(y);
            out[1] = std::cos(y);
          }};
      if (coupling == 0.0) spec.separable = SeparableKernel{0, {}, {}};
      set_constant_sigma(spec, sigma);
      break;
    }
    case BuiltinModel::LinearAttract: {
      const double rate = require_param(params, "a", "linear_attract");
      const double sigma = require_param(params, "sigma", "linear_attract");
      const double coupling = optional_param(params, "K", 1.0);
      spec.name = "linear_attract";
      spec.drift = [rate](double x) { return -rate * x; };
      spec.interaction = [coupling](double x, double y) { return coupling * std::tanh(y - x); };
      spec.lipschitz_drift = std::fabs(rate);
      spec.interaction_sup = std::fabs(coupling);
      spec.lipschitz_interaction = std::fabs(coupling);
      set_constant_sigma(spec, sigma);
      break;
    }
    case BuiltinModel::ConstantSigmaFree: {
      const double sigma = require_param(params, "sigma", "constant_sigma_free");
      spec.name = "constant_sigma_free";
      spec.drift = [](double) { return 0.0; };
      spec.interaction = [](double, double) { return 0.0; };
      spec.separable = SeparableKernel{0, {}, {}};
      set_constant_sigma(spec, sigma);
      break;
    }
  }
  return spec;
}

ValidationReport validate_model(const ModelSpec& spec, std::size_t n_samples, Interval box,
                                std::uint64_t seed) {
  ValidationReport report;
  if (n_samples == 0 || !(box.hi > box.lo)) {
    report.warnings.push_back("empty sample set or box; nothing checked");
    return report;
  }
  const Geometry& geom = spec.geometry;
  const double width = box.hi - box.lo;
  auto draw = [&](std::size_t k, std::uint64_t lane) {
    return box.lo + width * rng::uniform(seed, rng::Domain::Validate, k, lane);
  };
  auto record = [&](const char* check, double x, std::optional<double> y, double observed,
                    double declared) {
    // One witness per check is enough to act on.
    for (const auto& v : report.violations) {
      if (v.check == check) return;
    }
    report.violations.push_back({check, x, y, observed, declared});
  };

  const double sigma_ref = spec.diffusion(draw(0, 0));
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double x = draw(k, 0);
    const double y = draw(k, 1);
    const double x_far = draw(k, 2);
    const double x_near = x + width * 1e-3 * (rng::uniform(seed, rng::Domain::Validate, k, 3) - 0.5);

    const double gamma = spec.interaction(x, y);
    if (exceeds(std::fabs(gamma), spec.interaction_sup)) {
      record("interaction_sup", x, y, std::fabs(gamma), spec.interaction_sup);
    }

    const double s = spec.diffusion(x);
    if (spec.sigma_lower > 0.0 && (s < spec.sigma_lower * (1.0 - 1e-12) || exceeds(s, spec.sigma_upper))) {
      record("sigma_bounds", x, std::nullopt, s, s < spec.sigma_lower ? spec.sigma_lower : spec.sigma_upper);
    }
    if (spec.sigma_constant && s != sigma_ref) {
      record("sigma_constant", x, std::nullopt, s, sigma_ref);
    }

    for (const double other : {x_far, x_near}) {
      const double dist = geom.distance(x, other);
      if (dist <= 0.0) continue;
      const double df = std::fabs(spec.drift(x) - spec.drift(other)) / dist;
      if (exceeds(df, spec.lipschitz_drift)) record("lipschitz_drift", x, other, df, spec.lipschitz_drift);
      const double dg1 = std::fabs(spec.interaction(x, y) - spec.interaction(other, y)) / dist;
      const double dg2 = std::fabs(spec.interaction(y, x) - spec.interaction(y, other)) / dist;
      const double dg = std::max(dg1, dg2);
      if (exceeds(dg, spec.lipschitz_interaction)) {
        record("lipschitz_interaction", x, other, dg, spec.lipschitz_interaction);
      }
      const double ds = std::fabs(spec.diffusion(x) - spec.diffusion(other)) / dist;
      if (exceeds(ds, spec.lipschitz_diffusion)) {
        record("lipschitz_diffusion", x, other, ds, spec.lipschitz_diffusion);
      }
    }

    if (geom.is_circle()) {
      const double period = geom.period;
      auto off = [](double a, double b) { return std::fabs(a - b) > 1e-12 * std::max(1.0, std::fabs(a)); };
      if (off(spec.drift(x), spec.drift(x + period))) {
        record("periodic_drift", x, std::nullopt, spec.drift(x + period), spec.drift(x));
      }
      if (off(gamma, spec.interaction(x + period, y)) || off(gamma, spec.interaction(x, y + period))) {
        record("periodic_interaction", x, y, spec.interaction(x + period, y), gamma);
      }
      if (off(s, spec.diffusion(x + period))) {
        record("periodic_diffusion", x, std::nullopt, spec.diffusion(x + period), s);
      }
    }
  }
  if (!spec.sigma_constant && spec.sigma_lower <= 0.0) {
    report.warnings.push_back(
        "non-constant sigma without a positive lower bound; LDP diagnostics will be refused");
  }
  return report;
}

ModelSpec scale_interaction(const ModelSpec& spec, double factor) {
  ModelSpec out = spec;
  auto base = spec.interaction;
  out.interaction = [base, factor](double x, double y) { return factor * base(x, y); };
  out.interaction_sup = std::fabs(factor) * spec.interaction_sup;
  out.lipschitz_interaction = std::fabs(factor) * spec.lipschitz_interaction;
  if (spec.separable && spec.separable->rank > 0) {
    auto left = spec.separable->left;
    out.separable->left = [left, factor](double x, std::span<double> v) {
      left(x, v);
      for (double& e : v) e *= factor;
    };
  }
  return out;
}

}  // namespace erdiff
