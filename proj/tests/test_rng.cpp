#include <doctest.h>

#include <cmath>
#include <set>

#include "core/parallel.hpp"
#include "core/rng.hpp"

using namespace erdiff;

TEST_SUITE("rng") {
  TEST_CASE("philox4x32-10 known answers") {
    using rng::Counter;
    using rng::Key;
    CHECK(rng::philox4x32(Counter{0, 0, 0, 0}, Key{0, 0}) ==
          Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(rng::philox4x32(Counter{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          Key{0xffffffffu, 0xffffffffu}) ==
          Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(rng::philox4x32(Counter{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          Key{0xa4093822u, 0x299f31d0u}) ==
          Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("draws are pure functions of their coordinates") {
    CHECK(rng::uniform(7, rng::Domain::Graph, 3, 4) == rng::uniform(7, rng::Domain::Graph, 3, 4));
    CHECK(rng::uniform(7, rng::Domain::Graph, 3, 4) != rng::uniform(7, rng::Domain::Noise, 3, 4));
    CHECK(rng::uniform(7, rng::Domain::Graph, 3, 4) != rng::uniform(8, rng::Domain::Graph, 3, 4));
    CHECK(rng::uniform(7, rng::Domain::Graph, 3, 4) != rng::uniform(7, rng::Domain::Graph, 4, 3));
    CHECK(rng::normal(1, rng::Domain::Noise, 10, 20) == rng::normal(1, rng::Domain::Noise, 10, 20));
  }

  TEST_CASE("uniform moments and range") {
    const std::size_t N = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double u = rng::uniform(11, rng::Domain::Validate, k, 0);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sum2 += u * u;
    }
    const double mean = sum / N;
    const double var = sum2 / N - mean * mean;
    // 6 standard errors of the sample mean and variance
    CHECK(std::fabs(mean - 0.5) < 6.0 * std::sqrt(1.0 / 12.0 / N));
    CHECK(std::fabs(var - 1.0 / 12.0) < 6.0 * std::sqrt(1.0 / 180.0 / N));
  }

  TEST_CASE("normal moments") {
    const std::size_t N = 200000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double z = rng::normal(5, rng::Domain::Noise, k, 17);
      REQUIRE(std::isfinite(z));
      m1 += z;
      m2 += z * z;
      m4 += z * z * z * z;
    }
    m1 /= N;
    m2 /= N;
    m4 /= N;
    CHECK(std::fabs(m1) < 6.0 / std::sqrt(double(N)));
    CHECK(std::fabs(m2 - 1.0) < 6.0 * std::sqrt(2.0 / N));
    CHECK(std::fabs(m4 - 3.0) < 6.0 * std::sqrt(96.0 / N));
  }

  TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 4; ++tag)
      for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(rng::derive_seed(42, tag, i));
    CHECK(seen.size() == 4000);
    CHECK(rng::derive_seed(1, 2, 3) == rng::derive_seed(1, 2, 3));
  }

  TEST_CASE("for_each_index visits every index once") {
    std::vector<int> hits(10000, 0);
    parallel::for_each_index(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 16);
    for (const int h : hits) REQUIRE(h == 1);
    parallel::ThreadLimit limit(1);
    std::vector<int> again(100, 0);
    parallel::for_each_index(again.size(), [&](std::size_t i) { again[i] = static_cast<int>(i); }, 1);
    for (std::size_t i = 0; i < again.size(); ++i) REQUIRE(again[i] == static_cast<int>(i));
  }
}
