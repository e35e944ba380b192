#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace erdiff {

/// Directed Erdos-Renyi graph with self-loops, stored row- and
/// column-compressed. Entry (i, j) present means particle i feels particle j.
class ErGraph {
 public:
  using Index = std::uint32_t;

  ErGraph() = default;

  /// Builds from per-row sorted neighbour lists (validated).
  ErGraph(std::size_t n, double p, std::uint64_t seed, std::vector<std::vector<Index>> rows);

  /// Builds from an unordered edge list (duplicates rejected).
  static ErGraph from_edges(std::size_t n, double p, std::uint64_t seed,
                            std::span<const std::pair<Index, Index>> edges);

  std::size_t n() const { return n_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t edge_count() const { return out_idx_.size(); }

  std::span<const Index> out_neighbors(std::size_t i) const {
    return {out_idx_.data() + out_off_[i], out_off_[i + 1] - out_off_[i]};
  }
  std::span<const Index> in_neighbors(std::size_t i) const {
    return {in_idx_.data() + in_off_[i], in_off_[i + 1] - in_off_[i]};
  }
  std::size_t out_degree(std::size_t i) const { return out_off_[i + 1] - out_off_[i]; }
  std::size_t in_degree(std::size_t i) const { return in_off_[i + 1] - in_off_[i]; }

  /// All n*n entries present.
  bool is_complete() const { return edge_count() == n_ * n_; }

  ErGraph transpose() const;

  bool operator==(const ErGraph& other) const;

 private:
  void build_transpose();

  std::size_t n_ = 0;
  double p_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> out_off_{0};
  std::vector<Index> out_idx_;
  std::vector<std::size_t> in_off_{0};
  std::vector<Index> in_idx_;
};

/// Each entry xi_{i,j} is an independent Bernoulli(p) keyed by (seed, i, j).
/// With self_loops = false the diagonal is forced to zero.
ErGraph sample_er(std::size_t n, double p, std::uint64_t seed, bool self_loops = true);

struct DegreeReport {
  std::vector<double> row_disc;  ///< sum_j |xi_{i,j}/p - 1|
  std::vector<double> col_disc;  ///< sum_j |xi_{j,i}/p - 1|
  double max_disc = 0.0;         ///< max over both, divided by n
};

DegreeReport degree_report(const ErGraph& g);

/// Tail bound exp(-3(K-2)^2/(6+2(K-2)) p n) on one row discrepancy exceeding K n.
double bernstein_bound(double K, double p, std::size_t n);

/// Threshold 2 + 2/(3C) + sqrt(4/(9C^2) + 4/C); pass +infinity for C = inf.
double k_c(double C);

/// Every row and column discrepancy is at most K n.
bool degree_condition_holds(const ErGraph& g, double K);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace erdiff
