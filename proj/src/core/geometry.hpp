#pragma once

#include <cmath>

namespace erdiff {

/// State space of a single particle: the real line or a circle of given period.
struct Geometry {
  enum class Kind { Line, Circle };

  Kind kind = Kind::Line;
  double period = 0.0;

  static Geometry line() { return {Kind::Line, 0.0}; }
  static Geometry circle(double period) { return {Kind::Circle, period}; }

  bool is_circle() const { return kind == Kind::Circle; }

  /// Maps x into [0, period) on the circle; identity on the line.
  double wrap(double x) const {
    if (!is_circle()) return x;
    double r = x - period * std::floor(x / period);
    if (r >= period) r = 0.0;
    return r;
  }

  /// Geodesic distance on the circle, absolute difference on the line.
  double distance(double a, double b) const {
    const double d = std::fabs(a - b);
    if (!is_circle()) return d;
    const double r = std::fmod(d, period);
    return r > 0.5 * period ? period - r : r;
  }

  bool operator==(const Geometry& other) const {
    return kind == other.kind && (kind == Kind::Line || period == other.period);
  }
};

}  // namespace erdiff
