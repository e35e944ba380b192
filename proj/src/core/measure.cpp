#include "core/measure.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace erdiff {
namespace detail {
namespace {

double segment_cost(const Piece& piece, double alpha) {
  const double a = piece.start - alpha;
  const double b = piece.end - alpha;
  if (a * b >= 0.0) return piece.len * std::fabs(a + b) * 0.5;
  return piece.len * (a * a + b * b) / (2.0 * std::fabs(a - b));
}

double total_cost(std::span<const Piece> pieces, double alpha) {
  double acc = 0.0;
  for (const Piece& p : pieces) acc += segment_cost(p, alpha);
  return acc;
}

// Root of m{g < alpha} - m{g > alpha} strictly inside (left, right), where no
// piece endpoint value lies strictly inside the bracket.
std::optional<double> bracket_root(std::span<const Piece> pieces, double left, double right) {
  double constant = 0.0;
  double slope = 0.0;
  for (const Piece& p : pieces) {
    const double lo = std::min(p.start, p.end);
    const double hi = std::max(p.start, p.end);
    if (hi <= left) {
      constant += p.len;
    } else if (lo >= right) {
      constant -= p.len;
    } else {
      const double span = hi - lo;
      constant += p.len * (-2.0 * lo / span - 1.0);
      slope += 2.0 * p.len / span;
    }
  }
  if (!(slope > 0.0)) return std::nullopt;
  const double root = -constant / slope;
  if (root > left && root < right) return root;
  return std::nullopt;
}

// Lebesgue measure of {g <= alpha}.
double mass_at_or_below(std::span<const Piece> pieces, double alpha) {
  double acc = 0.0;
  for (const Piece& p : pieces) {
    const double lo = std::min(p.start, p.end);
    const double hi = std::max(p.start, p.end);
    if (hi <= alpha) {
      acc += p.len;
    } else if (lo < alpha) {
      acc += p.len * (alpha - lo) / (hi - lo);
    }
  }
  return acc;
}

}  // namespace

double line_cost(std::span<const Piece> pieces) { return total_cost(pieces, 0.0); }

double circle_cost(std::span<const Piece> pieces) {
  if (pieces.empty()) return 0.0;
  std::vector<double> candidates;
  candidates.reserve(2 * pieces.size());
  for (const Piece& p : pieces) {
    candidates.push_back(p.start);
    candidates.push_back(p.end);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // The minimizer is a median of g under Lebesgue measure: the first candidate
  // with at least half the length at or below it bounds it from the right.
  // Searching on this monotone mass rather than on cost comparisons keeps
  // near-equal candidates from misleading the search.
  double total = 0.0;
  for (const Piece& p : pieces) total += p.len;
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (2.0 * mass_at_or_below(pieces, candidates[mid]) >= total) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  double best = total_cost(pieces, candidates[lo]);
  if (lo > 0) {
    best = std::min(best, total_cost(pieces, candidates[lo - 1]));
    if (auto r = bracket_root(pieces, candidates[lo - 1], candidates[lo])) {
      best = std::min(best, total_cost(pieces, *r));
    }
  }
  return best;
}

}  // namespace detail

using detail::Piece;

namespace {

void require_same_geometry(const Geometry& a, const Geometry& b) {
  if (!(a == b)) throw DomainError("measures live on different geometries");
}

// Pieces of F_a - F_b for two atomic measures, over [start, stop].
std::vector<Piece> atomic_difference(std::span<const double> a, std::span<const double> b,
                                     double start, double stop) {
  // Exact integer numerators, so equal CDF gaps give bit-identical values.
  const auto na = static_cast<long long>(a.size());
  const auto nb = static_cast<long long>(b.size());
  const double denom = static_cast<double>(na * nb);
  std::vector<Piece> pieces;
  pieces.reserve(a.size() + b.size() + 1);
  std::size_t ia = 0;
  std::size_t ib = 0;
  double u = start;
  while (true) {
    while (ia < a.size() && a[ia] <= u) ++ia;
    while (ib < b.size() && b[ib] <= u) ++ib;
    double v = stop;
    if (ia < a.size()) v = std::min(v, a[ia]);
    if (ib < b.size()) v = std::min(v, b[ib]);
    const double diff =
        static_cast<double>(static_cast<long long>(ia) * nb - static_cast<long long>(ib) * na) / denom;
    if (v > u) pieces.push_back({v - u, diff, diff});
    if (v >= stop) break;
    u = v;
  }
  return pieces;
}

double density_cdf(const DensityGrid& dens, const std::vector<double>& cdf, double x) {
  if (x <= dens.lo) return 0.0;
  if (x >= dens.hi) return 1.0;
  const double h = dens.dx();
  auto k = static_cast<std::size_t>((x - dens.lo) / h);
  if (k >= dens.cells()) k = dens.cells() - 1;
  const double node = dens.lo + static_cast<double>(k) * h;
  return cdf[k] + (x - node) * dens.values[k];
}

void require_normalized(const DensityGrid& dens) {
  if (dens.cells() == 0) throw DomainError("density grid is empty");
  const double m = dens.mass();
  if (std::fabs(m - 1.0) > 1e-8) throw DomainError("density mass deviates from 1 by more than 1e-8");
}

struct TestFunction {
  bool ramp;
  double center;
  double width;
};

double evaluate(const TestFunction& f, const Geometry& geom, double x) {
  if (f.ramp) return std::clamp(x - f.center + 0.5 * f.width, 0.0, f.width);
  return std::max(0.0, f.width - geom.distance(x, f.center));
}

double quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(k);
  return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

std::vector<TestFunction> build_dictionary(std::span<const double> merged, const Geometry& geom,
                                           std::size_t size, std::uint64_t seed) {
  std::vector<TestFunction> dict;
  dict.reserve(size);
  const double span_lo = merged.front();
  const double span_hi = merged.back();
  for (std::uint64_t level = 0; dict.size() < size; ++level) {
    const double width = std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(level, 60)));
    const std::uint64_t centers = level < 20 ? (std::uint64_t{1} << level) : (std::uint64_t{1} << 20);
    auto push = [&](double c) {
      if (!geom.is_circle() && dict.size() < size) dict.push_back({true, c, width});
      if (dict.size() < size) dict.push_back({false, c, width});
    };
    for (std::uint64_t j = 0; j < centers && dict.size() < size; ++j) {
      push(quantile(merged, (static_cast<double>(j) + 0.5) / static_cast<double>(centers)));
    }
    const double u = rng::uniform(seed, rng::Domain::Dictionary, level, 0);
    push(span_lo + u * (span_hi - span_lo));
  }
  return dict;
}

double mean_of(const TestFunction& f, const Geometry& geom, std::span<const double> xs) {
  double acc = 0.0;
  for (const double x : xs) acc += evaluate(f, geom, x);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> samples, Geometry geometry)
    : samples_(std::move(samples)), geometry_(geometry) {
  for (double& x : samples_) {
    if (!std::isfinite(x)) throw DomainError("empirical measure sample is not finite");
    x = geometry_.wrap(x);
  }
  std::sort(samples_.begin(), samples_.end());
}

double w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  require_same_geometry(a.geometry(), b.geometry());
  if (a.size() == 0 || b.size() == 0) throw DomainError("w1 of an empty measure");
  const auto xa = a.samples();
  const auto xb = b.samples();
  if (!a.geometry().is_circle()) {
    if (xa.size() == xb.size()) {
      double acc = 0.0;
      for (std::size_t k = 0; k < xa.size(); ++k) acc += std::fabs(xa[k] - xb[k]);
      return acc / static_cast<double>(xa.size());
    }
    const double start = std::min(xa.front(), xb.front());
    const double stop = std::max(xa.back(), xb.back());
    return detail::line_cost(atomic_difference(xa, xb, start, stop));
  }
  return detail::circle_cost(atomic_difference(xa, xb, 0.0, a.geometry().period));
}

BlSandwich dbl_sandwich(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                        std::size_t dictionary_size, std::uint64_t seed) {
  BlSandwich out;
  out.upper = std::min(w1(a, b), 1.0);
  if (dictionary_size == 0) return out;
  std::vector<double> merged(a.samples().begin(), a.samples().end());
  merged.insert(merged.end(), b.samples().begin(), b.samples().end());
  std::sort(merged.begin(), merged.end());
  const auto dict = build_dictionary(merged, a.geometry(), dictionary_size, seed);
  double best = 0.0;
  for (const auto& f : dict) {
    const double gap = std::fabs(mean_of(f, a.geometry(), a.samples()) -
                                 mean_of(f, a.geometry(), b.samples()));
    best = std::max(best, gap);
  }
  out.lower = std::min(best, out.upper);
  return out;
}

double w1_to_density(const EmpiricalMeasure& emp, const DensityGrid& dens) {
  require_same_geometry(emp.geometry(), dens.geometry);
  require_normalized(dens);
  if (emp.size() == 0) throw DomainError("w1 of an empty measure");
  const auto xs = emp.samples();
  const auto cdf = dens.node_cdf();
  const double h = dens.dx();

  std::vector<double> breaks;
  breaks.reserve(dens.cells() + 1 + xs.size() + 2);
  for (std::size_t k = 0; k <= dens.cells(); ++k) breaks.push_back(dens.lo + static_cast<double>(k) * h);
  breaks.back() = dens.hi;
  breaks.insert(breaks.end(), xs.begin(), xs.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double w = 1.0 / static_cast<double>(xs.size());
  std::vector<Piece> pieces;
  pieces.reserve(breaks.size());
  std::size_t seen = 0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double u = breaks[k];
    const double v = breaks[k + 1];
    while (seen < xs.size() && xs[seen] <= u) ++seen;
    const double c = static_cast<double>(seen) * w;
    pieces.push_back({v - u, c - density_cdf(dens, cdf, u), c - density_cdf(dens, cdf, v)});
  }
  if (dens.geometry.is_circle()) return detail::circle_cost(pieces);
  return detail::line_cost(pieces);
}

double w1_between_densities(const DensityGrid& a, const DensityGrid& b) {
  require_same_geometry(a.geometry, b.geometry);
  if (a.cells() != b.cells() || a.lo != b.lo || a.hi != b.hi) {
    throw DomainError("densities must share the same grid");
  }
  const auto ca = a.node_cdf();
  const auto cb = b.node_cdf();
  const double h = a.dx();
  std::vector<Piece> pieces(a.cells());
  for (std::size_t k = 0; k < a.cells(); ++k) pieces[k] = {h, ca[k] - cb[k], ca[k + 1] - cb[k + 1]};
  if (a.geometry.is_circle()) return detail::circle_cost(pieces);
  return detail::line_cost(pieces);
}

double moment(const EmpiricalMeasure& emp, unsigned k) {
  if (k == 0) throw DomainError("moment order must be positive");
  if (emp.size() == 0) throw DomainError("moment of an empty measure");
  const auto xs = emp.samples();
  if (emp.geometry().is_circle()) {
    if (k != 1) throw DomainError("raw moments are undefined on the circle; use k = 1");
    const double omega = 2.0 * std::numbers::pi / emp.geometry().period;
    double re = 0.0;
    double im = 0.0;
    for (const double x : xs) {
      re += std::cos(omega * x);
      im += std::sin(omega * x);
    }
    const double n = static_cast<double>(xs.size());
    return std::hypot(re / n, im / n);
  }
  double acc = 0.0;
  for (const double x : xs) {
    double term = 1.0;
    for (unsigned e = 0; e < k; ++e) term *= x;
    acc += term;
  }
  return acc / static_cast<double>(xs.size());
}

}  // namespace erdiff
