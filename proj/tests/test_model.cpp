#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "core/errors.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"

using namespace erdiff;

namespace {

bool has_check(const ValidationReport& r, const std::string& name) {
  for (const auto& v : r.violations)
    if (v.check == name) return true;
  return false;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("kuramoto values and constants") {
    const auto k1 = builtin_model("kuramoto", {{"K", 1.0}, {"sigma", 1.0}});
    CHECK(k1.interaction(0.0, std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(k1.geometry.is_circle());
    CHECK(k1.geometry.period == doctest::Approx(2.0 * std::numbers::pi));
    const auto k2 = builtin_model("kuramoto", {{"K", 2.0}, {"sigma", 0.5}});
    CHECK(k2.interaction_sup == 2.0);
    CHECK(k2.lipschitz_interaction == 2.0);
    CHECK(k2.sigma_lower == 0.5);
    CHECK(k2.sigma_upper == 0.5);
    for (int k = 0; k < 100; ++k) {
      const double x = -10.0 + 0.2 * k;
      CHECK(k2.interaction(x, x) == 0.0);
    }
  }

  TEST_CASE("constant_sigma_free has no drift and no interaction") {
    const auto m = builtin_model("constant_sigma_free", {{"sigma", 1.0}});
    for (int k = 0; k < 50; ++k) {
      const double x = -5.0 + 0.37 * k, y = 3.0 - 0.21 * k;
      CHECK(m.interaction(x, y) == 0.0);
      CHECK(m.drift(x) == 0.0);
      CHECK(m.diffusion(x) == 1.0);
    }
  }

  TEST_CASE("linear_attract shape") {
    const auto m = builtin_model("linear_attract", {{"a", 2.0}, {"sigma", 1.0}});
    CHECK(m.drift(1.5) == -3.0);
    CHECK(m.interaction(0.0, 1.0) == doctest::Approx(std::tanh(1.0)));
    CHECK_FALSE(m.geometry.is_circle());
    const auto m3 = builtin_model("linear_attract", {{"a", 1.0}, {"sigma", 1.0}, {"K", 3.0}});
    CHECK(m3.interaction_sup == 3.0);
  }

  TEST_CASE("missing and non-finite parameters are configuration errors") {
    CHECK_THROWS_AS(builtin_model("kuramoto", {{"K", 1.0}}), ConfigError);
    CHECK_THROWS_AS(builtin_model("kuramoto", {{"K", NAN}, {"sigma", 1.0}}), ConfigError);
    CHECK_THROWS_AS(builtin_model("linear_attract", {{"sigma", 1.0}}), ConfigError);
    CHECK_THROWS_AS(builtin_model("no_such_model", {}), ConfigError);
    try {
      builtin_model("kuramoto", {{"K", 1.0}});
    } catch (const ConfigError& e) {
      CHECK(e.path() == "/model/params/sigma");
    }
  }

  TEST_CASE("separable factors reproduce the kernel") {
    const auto m = builtin_model("kuramoto", {{"K", 1.7}, {"sigma", 1.0}});
    REQUIRE(m.separable);
    REQUIRE(m.separable->rank == 2);
    double l[2], r[2];
    for (int k = 0; k < 1000; ++k) {
      const double x = 20.0 * rng::uniform(3, rng::Domain::Validate, k, 0) - 10.0;
      const double y = 20.0 * rng::uniform(3, rng::Domain::Validate, k, 1) - 10.0;
      m.separable->left(x, l);
      m.separable->right(y, r);
      CHECK(l[0] * r[0] + l[1] * r[1] == doctest::Approx(m.interaction(x, y)).epsilon(1e-13).scale(1.0));
    }
  }

  TEST_CASE("builtin kernels respect the declared sup norm") {
    const std::vector<ModelSpec> models = {builtin_model("kuramoto", {{"K", 1.3}, {"sigma", 1.0}}),
                                           builtin_model("linear_attract", {{"a", 1.0}, {"sigma", 1.0}, {"K", 0.7}}),
                                           builtin_model("constant_sigma_free", {{"sigma", 2.0}})};
    for (const auto& m : models) {
      for (std::size_t k = 0; k < 100000; ++k) {
        // Halton points in [-20, 20]^2
        double hx = 0.0, hy = 0.0, f = 0.5;
        for (std::size_t i = k + 1; i > 0; i /= 2, f *= 0.5) hx += f * static_cast<double>(i % 2);
        f = 1.0 / 3.0;
        for (std::size_t i = k + 1; i > 0; i /= 3, f /= 3.0) hy += f * static_cast<double>(i % 3);
        REQUIRE(std::fabs(m.interaction(40.0 * hx - 20.0, 40.0 * hy - 20.0)) <= m.interaction_sup);
      }
    }
  }

  TEST_CASE("validation of builtins is clean and deterministic") {
    const auto k = builtin_model("kuramoto", {{"K", 1.0}, {"sigma", 1.0}});
    const auto r1 = validate_model(k, 2000, {-10.0, 10.0}, 9);
    CHECK(r1.ok());
    CHECK(validate_model(builtin_model("constant_sigma_free", {{"sigma", 1.0}}), 500, {-5, 5}, 1).ok());
    CHECK(validate_model(builtin_model("linear_attract", {{"a", 1.0}, {"sigma", 1.0}}), 500, {-5, 5}, 1).ok());
    auto bad = k;
    bad.interaction_sup = 0.5;
    bad.lipschitz_interaction = 0.1;
    const auto a = validate_model(bad, 500, {-std::numbers::pi, std::numbers::pi}, 4);
    const auto b = validate_model(bad, 500, {-std::numbers::pi, std::numbers::pi}, 4);
    CHECK(has_check(a, "interaction_sup"));
    CHECK(has_check(a, "lipschitz_interaction"));
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
      CHECK(a.violations[i].check == b.violations[i].check);
      CHECK(a.violations[i].x == b.violations[i].x);
      CHECK(a.violations[i].observed == b.violations[i].observed);
    }
    for (const auto& v : a.violations)
      if (v.check == "interaction_sup") CHECK(v.observed > 0.5);
  }

  TEST_CASE("validation catches non-periodic and non-constant coefficients") {
    auto m = builtin_model("kuramoto", {{"K", 1.0}, {"sigma", 1.0}});
    m.drift = [](double x) { return 0.1 * x; };
    m.lipschitz_drift = 1.0;
    CHECK(has_check(validate_model(m, 200, {0, 6}, 2), "periodic_drift"));
    auto s = builtin_model("constant_sigma_free", {{"sigma", 1.0}});
    s.diffusion = [](double x) { return 1.0 + 0.5 * std::sin(x); };
    s.lipschitz_diffusion = 0.5;
    const auto r = validate_model(s, 200, {-3, 3}, 2);
    CHECK(has_check(r, "sigma_constant"));
    CHECK(has_check(r, "sigma_bounds"));
  }

  TEST_CASE("degenerate non-constant sigma is warned about") {
    auto s = builtin_model("constant_sigma_free", {{"sigma", 0.0}});
    s.diffusion = [](double x) { return std::fabs(std::sin(x)); };
    s.sigma_constant = false;
    s.sigma_upper = 1.0;
    s.lipschitz_diffusion = 1.0;
    const auto r = validate_model(s, 100, {-3, 3}, 1);
    CHECK(r.ok());
    CHECK(r.warnings.size() == 1);
  }

  TEST_CASE("scale_interaction scales kernel, bounds and factors") {
    const auto m = builtin_model("kuramoto", {{"K", 1.0}, {"sigma", 1.0}});
    const auto s = scale_interaction(m, -2.5);
    CHECK(s.interaction(0.3, 1.1) == doctest::Approx(-2.5 * m.interaction(0.3, 1.1)));
    CHECK(s.interaction_sup == 2.5);
    CHECK(s.lipschitz_interaction == 2.5);
    double l[2], r[2];
    s.separable->left(0.3, l);
    s.separable->right(1.1, r);
    CHECK(l[0] * r[0] + l[1] * r[1] == doctest::Approx(s.interaction(0.3, 1.1)));
  }

  TEST_CASE("zero coupling kuramoto has an identically zero kernel") {
    const auto m = builtin_model("kuramoto", {{"K", 0.0}, {"sigma", 1.0}});
    REQUIRE(m.separable);
    CHECK(m.separable->rank == 0);
    CHECK(m.interaction(0.4, 2.0) == 0.0);
  }
}
