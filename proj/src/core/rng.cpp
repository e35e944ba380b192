#include "core/rng.hpp"

#include <cmath>
#include <numbers>

namespace erdiff::rng {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Counter make_counter(Domain domain, std::uint64_t a, std::uint64_t b) {
  return {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
          static_cast<std::uint32_t>(b >> 32),
          static_cast<std::uint32_t>(domain) ^ static_cast<std::uint32_t>(a >> 32)};
}

inline Key make_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace

Counter philox4x32(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t bits(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b) noexcept {
  const Counter out = philox4x32(make_counter(domain, a, b), make_key(seed));
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double uniform(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b) noexcept {
  return to_unit(bits(seed, domain, a, b));
}

double normal(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b) noexcept {
  const Counter out = philox4x32(make_counter(domain, a, b), make_key(seed));
  const std::uint64_t x = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t y = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  const double u1 = 1.0 - to_unit(x);  // (0, 1]
  const double u2 = to_unit(y);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) noexcept {
  return splitmix(splitmix(splitmix(seed) ^ tag) + index);
}

}  // namespace erdiff::rng
