#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "core/geometry.hpp"

namespace erdiff {

/// Cell-averaged probability density on a periodic grid [0, period) or a
/// line box [lo, hi]. values[k] is the average over cell k.
struct DensityGrid {
  Geometry geometry = Geometry::line();
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;
  double time = 0.0;

  std::size_t cells() const { return values.size(); }
  double dx() const { return (hi - lo) / static_cast<double>(values.size()); }
  double center(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * dx(); }
  double mass() const;
  double length() const { return hi - lo; }

  /// CDF at the m+1 cell nodes, starting at 0.
  std::vector<double> node_cdf() const;

  /// Rescales values so that the mass is exactly one (up to rounding).
  void normalize();
};

/// Builds a density grid from a (not necessarily normalized) pdf by 5-point
/// Gauss-Legendre cell averages followed by normalization. For the circle
/// pass Geometry::circle(P); lo/hi are then 0 and P.
DensityGrid discretize_density(Geometry geometry, double lo, double hi, std::size_t cells,
                               const std::function<double(double)>& pdf);

/// Uniform density on the circle or the box.
DensityGrid uniform_density(Geometry geometry, double lo, double hi, std::size_t cells);

}  // namespace erdiff
