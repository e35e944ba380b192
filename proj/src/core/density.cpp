#include "core/density.hpp"

#include <array>
#include <cmath>

#include "core/errors.hpp"

namespace erdiff {

double DensityGrid::mass() const {
  double total = 0.0;
  for (const double v : values) total += v;
  return total * dx();
}

std::vector<double> DensityGrid::node_cdf() const {
  std::vector<double> cdf(values.size() + 1, 0.0);
  const double h = dx();
  for (std::size_t k = 0; k < values.size(); ++k) cdf[k + 1] = cdf[k] + values[k] * h;
  return cdf;
}

void DensityGrid::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("density has no positive finite mass");
  for (double& v : values) v /= m;
}

DensityGrid discretize_density(Geometry geometry, double lo, double hi, std::size_t cells,
                               const std::function<double(double)>& pdf) {
  if (cells == 0) throw ConfigError("density grid needs at least one cell", "/pde/m");
  if (geometry.is_circle()) {
    lo = 0.0;
    hi = geometry.period;
  }
  if (!(hi > lo)) throw ConfigError("density box must satisfy lo < hi", "/pde/box");
  static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665,
                                                    0.5688888888888889, 0.4786286704993665,
                                                    0.2369268850561891};
  DensityGrid grid;
  grid.geometry = geometry;
  grid.lo = lo;
  grid.hi = hi;
  grid.values.resize(cells);
  const double h = grid.dx();
  for (std::size_t k = 0; k < cells; ++k) {
    const double c = grid.center(k);
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) acc += weights[q] * pdf(c + 0.5 * h * nodes[q]);
    const double value = 0.5 * acc;
    if (value < 0.0 || !std::isfinite(value)) throw DomainError("pdf must be finite and nonnegative");
    grid.values[k] = value;
  }
  grid.normalize();
  return grid;
}

DensityGrid uniform_density(Geometry geometry, double lo, double hi, std::size_t cells) {
  if (geometry.is_circle()) {
    lo = 0.0;
    hi = geometry.period;
  }
  DensityGrid grid;
  grid.geometry = geometry;
  grid.lo = lo;
  grid.hi = hi;
  grid.values.assign(cells, 1.0 / (hi - lo));
  return grid;
}

}  // namespace erdiff
