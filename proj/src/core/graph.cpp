#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace erdiff {
namespace {

void check_p(double p) {
  if (!(p > 0.0) || p > 1.0 || !std::isfinite(p)) {
    throw ConfigError("edge probability must lie in (0, 1], got " + std::to_string(p), "/graph/p");
  }
}

}  // namespace

ErGraph::ErGraph(std::size_t n, double p, std::uint64_t seed, std::vector<std::vector<Index>> rows)
    : n_(n), p_(p), seed_(seed) {
  check_p(p);
  if (rows.size() != n) throw ConfigError("row count does not match vertex count");
  out_off_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) out_off_[i + 1] = out_off_[i] + rows[i].size();
  out_idx_.reserve(out_off_[n]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] >= n) throw ConfigError("edge target out of range in row " + std::to_string(i));
      if (k > 0 && row[k] <= row[k - 1]) {
        throw ConfigError("row " + std::to_string(i) + " is not strictly increasing");
      }
    }
    out_idx_.insert(out_idx_.end(), row.begin(), row.end());
  }
  build_transpose();
}

ErGraph ErGraph::from_edges(std::size_t n, double p, std::uint64_t seed,
                            std::span<const std::pair<Index, Index>> edges) {
  std::vector<std::vector<Index>> rows(n);
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) throw ConfigError("edge index out of range");
    rows[i].push_back(j);
  }
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw ConfigError("duplicate edge in edge list");
    }
  }
  return ErGraph(n, p, seed, std::move(rows));
}

void ErGraph::build_transpose() {
  in_off_.assign(n_ + 1, 0);
  for (const Index j : out_idx_) ++in_off_[j + 1];
  for (std::size_t j = 0; j < n_; ++j) in_off_[j + 1] += in_off_[j];
  in_idx_.assign(out_idx_.size(), 0);
  std::vector<std::size_t> cursor(in_off_.begin(), in_off_.end() - 1);
  // Rows visited in increasing i keep each column list sorted.
  for (std::size_t i = 0; i < n_; ++i) {
    for (const Index j : out_neighbors(i)) in_idx_[cursor[j]++] = static_cast<Index>(i);
  }
}

ErGraph ErGraph::transpose() const {
  ErGraph t;
  t.n_ = n_;
  t.p_ = p_;
  t.seed_ = seed_;
  t.out_off_ = in_off_;
  t.out_idx_ = in_idx_;
  t.in_off_ = out_off_;
  t.in_idx_ = out_idx_;
  return t;
}

bool ErGraph::operator==(const ErGraph& other) const {
  return n_ == other.n_ && p_ == other.p_ && seed_ == other.seed_ && out_off_ == other.out_off_ &&
         out_idx_ == other.out_idx_;
}

ErGraph sample_er(std::size_t n, double p, std::uint64_t seed, bool self_loops) {
  if (n == 0) throw ConfigError("graph needs at least one vertex", "/sweep/n");
  check_p(p);
  std::vector<std::vector<ErGraph::Index>> rows(n);
  parallel::for_each_index(
      n,
      [&](std::size_t i) {
        auto& row = rows[i];
        row.reserve(static_cast<std::size_t>(static_cast<double>(n) * p * 1.2) + 8);
        for (std::size_t j = 0; j < n; ++j) {
          if (!self_loops && i == j) continue;
          if (rng::uniform(seed, rng::Domain::Graph, i, j) < p) {
            row.push_back(static_cast<ErGraph::Index>(j));
          }
        }
      },
      8);
  return ErGraph(n, p, seed, std::move(rows));
}

DegreeReport degree_report(const ErGraph& g) {
  const std::size_t n = g.n();
  const double scale = 1.0 / g.p() - 1.0;
  DegreeReport report;
  report.row_disc.resize(n);
  report.col_disc.resize(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto out = static_cast<double>(g.out_degree(i));
    const auto in = static_cast<double>(g.in_degree(i));
    report.row_disc[i] = out * scale + (static_cast<double>(n) - out);
    report.col_disc[i] = in * scale + (static_cast<double>(n) - in);
    worst = std::max({worst, report.row_disc[i], report.col_disc[i]});
  }
  report.max_disc = n > 0 ? worst / static_cast<double>(n) : 0.0;
  return report;
}

double bernstein_bound(double K, double p, std::size_t n) {
  if (!(K > 2.0)) throw DomainError("bernstein_bound requires K > 2");
  if (!(p > 0.0) || p > 1.0) throw DomainError("bernstein_bound requires p in (0, 1]");
  if (n == 0) throw DomainError("bernstein_bound requires n >= 1");
  const double excess = K - 2.0;
  const double rate = 3.0 * excess * excess / (6.0 + 2.0 * excess);
  return std::clamp(std::exp(-rate * p * static_cast<double>(n)), 0.0, 1.0);
}

double k_c(double C) {
  if (!(C > 0.0)) throw DomainError("k_c requires C > 0");
  if (std::isinf(C)) return 2.0;
  return 2.0 + 2.0 / (3.0 * C) + std::sqrt(4.0 / (9.0 * C * C) + 4.0 / C);
}

bool degree_condition_holds(const ErGraph& g, double K) {
  const DegreeReport report = degree_report(g);
  const double limit = K * static_cast<double>(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (report.row_disc[i] > limit || report.col_disc[i] > limit) return false;
  }
  return true;
}

}  // namespace erdiff
