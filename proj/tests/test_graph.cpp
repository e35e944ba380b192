#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/graph.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

using namespace erdiff;

TEST_SUITE("graph") {
  TEST_CASE("p = 1 gives the complete graph") {
    const auto g = sample_er(5, 1.0, 123);
    CHECK(g.edge_count() == 25);
    CHECK(g.is_complete());
    for (std::size_t i = 0; i < 5; ++i) CHECK(g.out_degree(i) == 5);
    const auto rep = degree_report(g);
    for (const double d : rep.row_disc) CHECK(d == 0.0);
    CHECK(rep.max_disc == 0.0);
  }

  TEST_CASE("matches a scalar Bernoulli loop") {
    const std::size_t n = 1000;
    const double p = 0.3;
    const std::uint64_t seed = 77;
    const auto g = sample_er(n, p, seed);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<ErGraph::Index> row;
      for (std::size_t j = 0; j < n; ++j)
        if (rng::uniform(seed, rng::Domain::Graph, i, j) < p) row.push_back(static_cast<ErGraph::Index>(j));
      count += row.size();
      const auto got = g.out_neighbors(i);
      REQUIRE(std::vector<ErGraph::Index>(got.begin(), got.end()) == row);
    }
    CHECK(count == g.edge_count());
    const double sd = std::sqrt(double(n) * n * p * (1 - p));
    CHECK(std::fabs(double(count) - 300000.0) <= 6.0 * sd);
  }

  TEST_CASE("sampling is deterministic and thread-count independent") {
    const auto a = sample_er(3, 0.5, 9);
    const auto b = sample_er(3, 0.5, 9);
    CHECK(a == b);
    const auto big = sample_er(700, 0.05, 4);
    parallel::ThreadLimit one(1);
    CHECK(sample_er(700, 0.05, 4) == big);
  }

  TEST_CASE("transpose is exact and swaps the discrepancies") {
    const auto g = sample_er(300, 0.1, 5);
    const auto t = g.transpose();
    for (std::size_t i = 0; i < g.n(); ++i) {
      const auto in = g.in_neighbors(i);
      const auto out_t = t.out_neighbors(i);
      REQUIRE(std::vector<ErGraph::Index>(in.begin(), in.end()) ==
              std::vector<ErGraph::Index>(out_t.begin(), out_t.end()));
    }
    const auto rg = degree_report(g);
    const auto rt = degree_report(t);
    CHECK(rg.row_disc == rt.col_disc);
    CHECK(rg.col_disc == rt.row_disc);
    CHECK(rg.max_disc == rt.max_disc);
    CHECK(t.transpose() == g);
  }

  TEST_CASE("self loops flag") {
    const auto g = sample_er(200, 1.0, 3, false);
    CHECK(g.edge_count() == 200 * 199);
    for (std::size_t i = 0; i < 200; ++i)
      for (const auto j : g.out_neighbors(i)) REQUIRE(j != i);
  }

  TEST_CASE("bad parameters") {
    CHECK_THROWS_AS(sample_er(10, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(sample_er(10, 1.5, 1), ConfigError);
    CHECK_THROWS_AS(sample_er(10, -0.1, 1), ConfigError);
    const std::vector<std::vector<ErGraph::Index>> unsorted = {{1, 0}, {}};
    CHECK_THROWS(ErGraph(2, 0.5, 0, unsorted));
    const std::vector<std::vector<ErGraph::Index>> out_of_range = {{2}, {}};
    CHECK_THROWS(ErGraph(2, 0.5, 0, out_of_range));
  }

  TEST_CASE("degree report small cases") {
    const ErGraph full_row(2, 0.5, 0, {{0, 1}, {}});
    const auto rep = degree_report(full_row);
    CHECK(rep.row_disc[0] == 2.0);  // |1/0.5 - 1| twice
    CHECK(rep.row_disc[1] == 2.0);  // |0 - 1| twice
    for (std::size_t i = 0; i < 2; ++i) CHECK(rep.max_disc * 2 >= rep.row_disc[i]);
  }

  TEST_CASE("degree report matches the entrywise sum") {
    const auto g = sample_er(150, 0.2, 8);
    const auto rep = degree_report(g);
    std::vector<std::vector<int>> adj(150, std::vector<int>(150, 0));
    for (std::size_t i = 0; i < 150; ++i)
      for (const auto j : g.out_neighbors(i)) adj[i][j] = 1;
    double mx = 0.0;
    for (std::size_t i = 0; i < 150; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < 150; ++j) {
        row += std::fabs(adj[i][j] / 0.2 - 1.0);
        col += std::fabs(adj[j][i] / 0.2 - 1.0);
      }
      CHECK(rep.row_disc[i] == doctest::Approx(row).epsilon(1e-12));
      CHECK(rep.col_disc[i] == doctest::Approx(col).epsilon(1e-12));
      CHECK(rep.row_disc[i] >= 0.0);
      mx = std::max({mx, row, col});
    }
    CHECK(rep.max_disc == doctest::Approx(mx / 150).epsilon(1e-12));
  }

  TEST_CASE("bernstein bound arithmetic") {
    CHECK(bernstein_bound(4.0, 0.5, 200) == doctest::Approx(std::exp(-120.0)).epsilon(1e-12));
    CHECK(bernstein_bound(4.0, 0.5, 200) == doctest::Approx(7.7e-53).epsilon(0.01));
    CHECK(bernstein_bound(5.0, 0.1, 100) == doctest::Approx(std::exp(-22.5)).epsilon(1e-12));
    CHECK(bernstein_bound(std::nextafter(2.0, 3.0), 1.0, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(bernstein_bound(2.0, 0.5, 10), DomainError);
    CHECK_THROWS_AS(bernstein_bound(1.0, 0.5, 10), DomainError);
  }

  TEST_CASE("k_c arithmetic") {
    CHECK(k_c(kInfinity) == 2.0);
    CHECK(k_c(1.0) == doctest::Approx(2.0 + 2.0 / 3.0 + std::sqrt(4.0 / 9.0 + 4.0)).epsilon(1e-15));
    CHECK(k_c(1.0) == doctest::Approx(4.7749).epsilon(1e-4));
    CHECK(k_c(4.0) == doctest::Approx(3.1805).epsilon(1e-4));
    CHECK_THROWS_AS(k_c(0.0), DomainError);
    CHECK_THROWS_AS(k_c(-1.0), DomainError);
    // decreasing towards 2
    double prev = k_c(0.1);
    for (double C = 0.2; C < 1e6; C *= 2.0) {
      const double v = k_c(C);
      CHECK(v < prev);
      CHECK(v > 2.0);
      prev = v;
    }
  }

  TEST_CASE("degree condition") {
    CHECK(degree_condition_holds(sample_er(50, 1.0, 1), 0.01));
    const ErGraph empty(4, 0.5, 0, std::vector<std::vector<ErGraph::Index>>(4));
    CHECK(degree_condition_holds(empty, 1.0));
    CHECK_FALSE(degree_condition_holds(empty, 0.5));
  }

  TEST_CASE("concentration frequency below the bound plus Monte Carlo slack") {
    const std::size_t n = 200, R = 300;
    const double p = 0.1;
    for (const double K : {2.2, 2.5, 3.0, 4.0}) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < R; ++r) {
        const auto rep = degree_report(sample_er(n, p, rng::derive_seed(99, 1, r)));
        hits += rep.row_disc[0] >= K * n ? 1 : 0;
      }
      const double bound = bernstein_bound(K, p, n);
      const double freq = double(hits) / R;
      CHECK(freq <= bound + 3.0 * std::sqrt(bound * (1 - bound) / R));
    }
  }

  TEST_CASE("edge list construction") {
    const std::vector<std::pair<ErGraph::Index, ErGraph::Index>> edges = {{2, 0}, {0, 1}, {0, 0}};
    const auto g = ErGraph::from_edges(3, 0.4, 11, edges);
    CHECK(g.edge_count() == 3);
    CHECK(g.out_degree(0) == 2);
    CHECK(g.in_degree(0) == 2);
    CHECK(g.seed() == 11);
    const std::vector<std::pair<ErGraph::Index, ErGraph::Index>> dup = {{0, 1}, {0, 1}};
    CHECK_THROWS(ErGraph::from_edges(3, 0.4, 11, dup));
  }
}
