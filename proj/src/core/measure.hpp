#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/density.hpp"
#include "core/geometry.hpp"

namespace erdiff {

/// Uniform atomic measure on a sorted set of samples. On the circle the
/// samples are wrapped into [0, period).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<double> samples, Geometry geometry);

  std::span<const double> samples() const { return samples_; }
  const Geometry& geometry() const { return geometry_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<double> samples_;
  Geometry geometry_;
};

/// Exact Wasserstein-1 distance. Line: quantile coupling (order statistics
/// for equal sizes, CDF integral otherwise). Circle: CDF difference shifted
/// by its Lebesgue median, which is the optimal rotation.
double w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

struct BlSandwich {
  double lower = 0.0;
  double upper = 0.0;
};

/// Certified bracket of the bounded-Lipschitz distance. upper = min(W1, 1);
/// lower = best of the first dictionary_size tent/ramp test functions
/// (values in [0, 1], slope at most 1). The dictionary for size N is a
/// prefix of the one for size N + 1.
BlSandwich dbl_sandwich(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                        std::size_t dictionary_size, std::uint64_t seed);

/// W1 between an empirical measure and a piecewise-constant density.
/// Throws DomainError when the density mass is off by more than 1e-8.
double w1_to_density(const EmpiricalMeasure& emp, const DensityGrid& dens);

/// W1 between two densities on the same grid.
double w1_between_densities(const DensityGrid& a, const DensityGrid& b);

/// Line: raw moment (1/n) sum x^k. Circle: only k = 1, the order parameter
/// |(1/n) sum exp(2 pi i x / period)|.
double moment(const EmpiricalMeasure& emp, unsigned k);

namespace detail {

/// Segment of a piecewise-linear function, running from start to end over len.
struct Piece {
  double len;
  double start;
  double end;
};

/// Integral of |g|.
double line_cost(std::span<const Piece> pieces);

/// min over alpha of the integral of |g - alpha|.
double circle_cost(std::span<const Piece> pieces);

}  // namespace detail
}  // namespace erdiff
