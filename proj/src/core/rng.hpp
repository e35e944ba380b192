#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers. Every draw is a pure function of
// (seed, domain, a, b), so results do not depend on evaluation order or on
// how work is split across threads.
namespace erdiff::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
Counter philox4x32(Counter ctr, Key key) noexcept;

/// Stream tags keep unrelated consumers of the same seed apart.
enum class Domain : std::uint32_t {
  Graph = 0x47524150u,
  Noise = 0x4e4f4953u,
  Validate = 0x56414c49u,
  Dictionary = 0x44494354u,
  Bootstrap = 0x424f4f54u,
};

/// 64 random bits for the coordinate (a, b) of a stream.
std::uint64_t bits(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b) noexcept;

/// Uniform on [0, 1) with 53 bits of resolution.
double uniform(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b) noexcept;

/// Standard normal via Box-Muller on one Philox block.
double normal(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b) noexcept;

/// Derives an independent child seed (splitmix64 finalizer chain).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) noexcept;

}  // namespace erdiff::rng
