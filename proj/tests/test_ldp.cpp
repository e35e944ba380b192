#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "core/density.hpp"
#include "core/errors.hpp"
#include "core/ldp.hpp"
#include "core/model.hpp"
#include "core/parallel.hpp"

using namespace erdiff;

namespace {

DensityGrid circle_vm(std::size_t m) {
  return discretize_density(Geometry::circle(2.0 * std::numbers::pi), 0.0, 2.0 * std::numbers::pi, m,
                            [](double x) { return std::exp(std::cos(x)); });
}

SimConfig short_sim() {
  SimConfig s;
  s.dt = 0.01;
  s.T = 0.2;
  return s;
}

}  // namespace

TEST_SUITE("ldp") {
  TEST_CASE("sequences") {
    const auto a = ldp_sequences(1000, std::exp(1.0) / 1000.0);
    CHECK(a.C == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.delta == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    const auto b = ldp_sequences(100, std::exp(4.0) / 100.0);
    CHECK(b.C == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.delta == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(ldp_sequences(10, 0.1), DomainError);
    CHECK_THROWS_AS(ldp_sequences(10, 0.05), DomainError);
    // C grows and delta shrinks along a log schedule
    double prevC = 0.0, prevD = 1e300;
    for (std::size_t n = 100; n <= 100000; n *= 10) {
      const auto s = ldp_sequences(n, 3.0 * std::log(n) / n);
      CHECK(s.C > prevC);
      CHECK(s.delta < prevD);
      prevC = s.C;
      prevD = s.delta;
    }
  }

  TEST_CASE("exponential moment statistic") {
    const std::vector<double> qv = {0.1, 0.5, 0.2, 0.9};
    const double C = 1.7;
    double direct = 0.0;
    for (const double q : qv) direct += std::exp(C * q) / 4.0;
    CHECK(exponential_moment_statistic(qv, C, 10) == doctest::Approx(std::log(direct) / 10).epsilon(1e-14));
    auto perm = qv;
    std::reverse(perm.begin(), perm.end());
    CHECK(exponential_moment_statistic(perm, C, 10) == exponential_moment_statistic(qv, C, 10));
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    CHECK(exponential_moment_statistic(perm, C, 10) == exponential_moment_statistic(qv, C, 10));
    // no overflow for large exponents
    CHECK(exponential_moment_statistic({1000.0, 1000.0}, 10.0, 100) == doctest::Approx(100.0));
    CHECK(exponential_moment_statistic({0.0}, 3.0, 5) == 0.0);
    CHECK_THROWS_AS(exponential_moment_statistic({}, 1.0, 5), DomainError);
  }

  TEST_CASE("complete graph never exceeds") {
    const auto model = builtin_model("kuramoto", {{"K", 2.0}, {"sigma", 1.0}});
    auto probe = make_probe(50, 1.0, 4, 3, 11);
    probe = estimate_omega_frequency(model, probe, short_sim(), circle_vm(64));
    CHECK(probe.omega_frequency == 0.0);
    for (const auto& g : probe.graphs) {
      CHECK(g.statistic == 0.0);
      CHECK(g.mean_qv == 0.0);
    }
  }

  TEST_CASE("no interaction never exceeds") {
    const auto model = builtin_model("kuramoto", {{"K", 0.0}, {"sigma", 1.0}});
    auto probe = make_probe(200, 0.1, 5, 2, 3);
    probe = estimate_omega_frequency(model, probe, short_sim(), circle_vm(64));
    CHECK(probe.omega_frequency == 0.0);
  }

  TEST_CASE("probe is deterministic and independent of threads") {
    const auto model = builtin_model("kuramoto", {{"K", 3.0}, {"sigma", 0.5}});
    const auto probe = make_probe(120, 0.2, 6, 3, 5);
    const auto a = estimate_omega_frequency(model, probe, short_sim(), circle_vm(64));
    parallel::ThreadLimit one(1);
    const auto b = estimate_omega_frequency(model, probe, short_sim(), circle_vm(64));
    REQUIRE(a.graphs.size() == 6);
    for (std::size_t g = 0; g < 6; ++g) {
      CHECK(a.graphs[g].statistic == b.graphs[g].statistic);
      CHECK(a.graphs[g].graph_seed == b.graphs[g].graph_seed);
      CHECK(a.graphs[g].mean_qv > 0.0);
      CHECK(a.graphs[g].statistic >= 0.0);
    }
    CHECK(a.omega_frequency == b.omega_frequency);
    // distinct graphs per replica
    CHECK(a.graphs[0].graph_seed != a.graphs[1].graph_seed);
  }

  TEST_CASE("degenerate noise is rejected") {
    const auto model = builtin_model("kuramoto", {{"K", 1.0}, {"sigma", 0.0}});
    const auto probe = make_probe(50, 0.5, 2, 2, 1);
    CHECK_THROWS_AS(estimate_omega_frequency(model, probe, short_sim(), circle_vm(32)), ConfigError);
    auto bad = make_probe(50, 0.5, 0, 2, 1);
    CHECK_THROWS_AS(estimate_omega_frequency(builtin_model("kuramoto", {{"K", 1.0}, {"sigma", 1.0}}), bad,
                                             short_sim(), circle_vm(32)),
                    ConfigError);
  }
}
