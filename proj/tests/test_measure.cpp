#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "core/density.hpp"
#include "core/errors.hpp"
#include "core/measure.hpp"
#include "core/rng.hpp"

using namespace erdiff;

namespace {

// Hungarian algorithm (potentials form) on a square cost matrix.
double assignment_cost(const std::vector<std::vector<double>>& c) {
  const std::size_t n = c.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += c[p[j] - 1][j - 1];
  return total;
}

// Uniform measures with na and nb atoms: replicate both to lcm(na, nb) atoms
// and solve the assignment problem.
double w1_oracle(const std::vector<double>& a, const std::vector<double>& b, const Geometry& g) {
  const std::size_t L = std::lcm(a.size(), b.size());
  std::vector<double> ra, rb;
  for (const double x : a)
    for (std::size_t r = 0; r < L / a.size(); ++r) ra.push_back(x);
  for (const double x : b)
    for (std::size_t r = 0; r < L / b.size(); ++r) rb.push_back(x);
  std::vector<std::vector<double>> c(L, std::vector<double>(L));
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j) c[i][j] = g.distance(ra[i], rb[j]);
  return assignment_cost(c) / static_cast<double>(L);
}

// Minimum over all permutations, for very small equal sizes.
double w1_permutations(std::vector<double> a, const std::vector<double>& b, const Geometry& g) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += g.distance(a[i], b[perm[i]]);
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.size());
}

std::vector<double> draw(std::size_t n, std::uint64_t seed, double lo, double hi, bool ties) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng::uniform(seed, rng::Domain::Validate, i, 0);
    if (ties) u = std::floor(u * 4.0) / 4.0;
    xs[i] = lo + (hi - lo) * u;
  }
  return xs;
}

double w1_of(const std::vector<double>& a, const std::vector<double>& b, const Geometry& g) {
  return w1(EmpiricalMeasure(a, g), EmpiricalMeasure(b, g));
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("worked examples") {
    const auto line = Geometry::line();
    CHECK(w1_of({0.0}, {1.0}, line) == doctest::Approx(1.0));
    CHECK(w1_of({0.0, 1.0}, {0.5}, line) == doctest::Approx(0.5));
    CHECK(w1_of({0.0, 0.0, 3.0}, {1.0, 2.0}, line) == doctest::Approx(w1_oracle({0, 0, 3}, {1, 2}, line)));
    const auto circ = Geometry::circle(1.0);
    CHECK(w1_of({0.05}, {0.95}, circ) == doctest::Approx(0.1));
    CHECK(w1_of({0.0, 0.5}, {0.25, 0.75}, circ) == doctest::Approx(0.25));
    // wrapping is applied on construction
    CHECK(w1_of({1.05}, {-0.05}, circ) == doctest::Approx(0.1));
  }

  TEST_CASE("agrees with permutation brute force on equal sizes") {
    for (const bool circle : {false, true}) {
      const Geometry g = circle ? Geometry::circle(2.0) : Geometry::line();
      for (std::uint64_t s = 0; s < 60; ++s) {
        const std::size_t n = 1 + s % 6;
        const auto a = draw(n, 2 * s, 0.0, 2.0, s % 3 == 0);
        const auto b = draw(n, 2 * s + 1, 0.0, 2.0, s % 3 == 0);
        REQUIRE(w1_of(a, b, g) == doctest::Approx(w1_permutations(a, b, g)).epsilon(1e-12).scale(1.0));
      }
    }
  }

  TEST_CASE("agrees with the assignment oracle on unequal sizes") {
    for (const bool circle : {false, true}) {
      const Geometry g = circle ? Geometry::circle(1.0) : Geometry::line();
      for (std::uint64_t s = 0; s < 80; ++s) {
        const std::size_t na = 1 + s % 7;
        const std::size_t nb = 1 + (s / 7) % 5;
        const auto a = draw(na, 1000 + s, 0.0, 1.0, s % 4 == 1);
        const auto b = draw(nb, 2000 + s, 0.0, 1.0, s % 4 == 1);
        REQUIRE(std::fabs(w1_of(a, b, g) - w1_oracle(a, b, g)) <= 1e-12);
      }
    }
  }

  TEST_CASE("metric properties") {
    const auto line = Geometry::line();
    const auto circ = Geometry::circle(3.0);
    for (std::uint64_t s = 0; s < 30; ++s) {
      for (const auto& g : {line, circ}) {
        const auto a = draw(5 + s % 4, 10 * s, 0.0, 3.0, false);
        const auto b = draw(3 + s % 5, 10 * s + 1, 0.0, 3.0, false);
        const auto c = draw(4 + s % 3, 10 * s + 2, 0.0, 3.0, false);
        CHECK(w1_of(a, a, g) == doctest::Approx(0.0).scale(1.0));
        CHECK(w1_of(a, b, g) >= 0.0);
        CHECK(w1_of(a, b, g) == doctest::Approx(w1_of(b, a, g)).epsilon(1e-12));
        CHECK(w1_of(a, c, g) <= w1_of(a, b, g) + w1_of(b, c, g) + 1e-12);
        // translation invariance on both geometries
        auto a_shift = a, b_shift = b;
        for (double& x : a_shift) x += 0.37;
        for (double& x : b_shift) x += 0.37;
        CHECK(w1_of(a_shift, b_shift, g) == doctest::Approx(w1_of(a, b, g)).epsilon(1e-12));
      }
    }
    // on the circle the distance never exceeds half the period
    CHECK(w1_of({0.0, 0.0}, {1.5, 1.5}, circ) == doctest::Approx(1.5));
  }

  TEST_CASE("mismatched geometries are rejected") {
    EmpiricalMeasure a({0.0}, Geometry::line());
    EmpiricalMeasure b({0.0}, Geometry::circle(1.0));
    CHECK_THROWS_AS(w1(a, b), DomainError);
    EmpiricalMeasure empty({}, Geometry::line());
    CHECK_THROWS_AS(w1(a, empty), DomainError);
    CHECK_THROWS_AS(EmpiricalMeasure({std::nan("")}, Geometry::line()), DomainError);
  }

  TEST_CASE("bounded-Lipschitz sandwich") {
    for (const bool circle : {false, true}) {
      const Geometry g = circle ? Geometry::circle(2.0 * std::numbers::pi) : Geometry::line();
      for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = EmpiricalMeasure(draw(40, 3 * s, 0.0, 6.0, false), g);
        const auto b = EmpiricalMeasure(draw(25, 3 * s + 1, 0.5, 4.0, false), g);
        const double W = w1(a, b);
        double prev = 0.0;
        for (const std::size_t N : {0u, 1u, 2u, 5u, 16u, 64u, 200u}) {
          const auto s1 = dbl_sandwich(a, b, N, 42);
          CHECK(s1.upper == doctest::Approx(std::min(W, 1.0)));
          CHECK(s1.lower >= 0.0);
          CHECK(s1.lower <= s1.upper);
          CHECK(s1.lower >= prev);
          prev = s1.lower;
        }
        const auto x = dbl_sandwich(a, b, 64, 7);
        const auto y = dbl_sandwich(a, b, 64, 7);
        CHECK(x.lower == y.lower);
        CHECK(x.upper == y.upper);
      }
    }
  }

  TEST_CASE("sandwich of far-apart point masses") {
    const auto g = Geometry::line();
    const auto s = dbl_sandwich(EmpiricalMeasure({0.0}, g), EmpiricalMeasure({10.0}, g), 4, 1);
    CHECK(s.upper == 1.0);
    CHECK(s.lower == doctest::Approx(1.0));
  }

  TEST_CASE("w1 to a density matches numerical integration") {
    for (const bool circle : {false, true}) {
      const double P = 2.0 * std::numbers::pi;
      const Geometry g = circle ? Geometry::circle(P) : Geometry::line();
      const double lo = circle ? 0.0 : -4.0;
      const double hi = circle ? P : 4.0;
      const auto dens = discretize_density(g, lo, hi, 64, [&](double x) {
        return circle ? std::exp(std::cos(x)) : std::exp(-0.5 * x * x);
      });
      const auto xs = draw(17, circle ? 5 : 6, lo + 0.5, hi - 0.5, false);
      const EmpiricalMeasure emp(xs, g);
      // fine midpoint quadrature of |F_emp - F_dens - alpha|
      const std::size_t M = 400000;
      const double h = (hi - lo) / M;
      std::vector<double> diff(M);
      const auto cdf = dens.node_cdf();
      const auto sorted = emp.samples();
      std::size_t k = 0;
      for (std::size_t q = 0; q < M; ++q) {
        const double x = lo + (q + 0.5) * h;
        while (k < sorted.size() && sorted[k] <= x) ++k;
        const double t = (x - lo) / dens.dx();
        const auto cell = std::min<std::size_t>(static_cast<std::size_t>(t), dens.cells() - 1);
        const double Fd = cdf[cell] + (t - cell) * (cdf[cell + 1] - cdf[cell]);
        diff[q] = double(k) / sorted.size() - Fd;
      }
      double alpha = 0.0;
      if (circle) {
        auto tmp = diff;
        std::nth_element(tmp.begin(), tmp.begin() + M / 2, tmp.end());
        alpha = tmp[M / 2];
      }
      double integral = 0.0;
      for (const double d : diff) integral += std::fabs(d - alpha) * h;
      CHECK(w1_to_density(emp, dens) == doctest::Approx(integral).epsilon(1e-4));
    }
  }

  TEST_CASE("w1 to a density rejects bad mass") {
    auto dens = uniform_density(Geometry::line(), 0.0, 1.0, 10);
    dens.values[0] += 1.0;
    CHECK_THROWS_AS(w1_to_density(EmpiricalMeasure({0.5}, Geometry::line()), dens), DomainError);
  }

  TEST_CASE("moments") {
    const auto line = Geometry::line();
    CHECK(moment(EmpiricalMeasure({1.0, 2.0, 3.0}, line), 1) == doctest::Approx(2.0));
    CHECK(moment(EmpiricalMeasure({1.0, 2.0, 3.0}, line), 2) == doctest::Approx(14.0 / 3.0));
    const auto circ = Geometry::circle(1.0);
    CHECK(moment(EmpiricalMeasure({0.3, 0.3}, circ), 1) == doctest::Approx(1.0));
    CHECK(moment(EmpiricalMeasure({0.0, 0.5}, circ), 1) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(moment(EmpiricalMeasure({0.1}, circ), 2), DomainError);
    CHECK_THROWS_AS(moment(EmpiricalMeasure({0.1}, line), 0), DomainError);
  }
}
