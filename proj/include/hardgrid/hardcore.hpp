#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hardgrid/log_weight.hpp"

namespace hardgrid {

class HardCoreGraph;

/// Undirected simple graph in CSR form with a weight per vertex.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Builds from an edge list; duplicate edges are merged, self-loops rejected.
  WeightedGraph(std::size_t num_vertices, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                std::vector<double> weights);
  /// Adopts CSR arrays that must already be symmetric, sorted and loop-free.
  static WeightedGraph from_csr(std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> neighbors,
                                std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t v) const noexcept { return weights_[v]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::span<const std::uint32_t> neighbors(std::size_t v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const noexcept;
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }
  double max_weight() const noexcept;
  bool has_edge(std::size_t u, std::size_t v) const noexcept;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

  /// Subgraph induced on the listed vertices; vertex k of the result is vertices[k].
  WeightedGraph induced(std::span<const std::uint32_t> vertices) const;
  WeightedGraph with_weights(std::vector<double> weights) const;

  const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
  const std::vector<std::uint32_t>& flat_neighbors() const noexcept { return neighbors_; }

 private:
  std::vector<std::uint64_t> offsets_{0};
  std::vector<std::uint32_t> neighbors_;
  std::vector<double> weights_;
};

/// Vertex limit for branching enumeration.
inline constexpr std::size_t kExactVertexCap = 30;

/*!
 * ln Z(G, w) by branching on a maximum-degree vertex: Z(G) = Z(G - v) + w(v) Z(G - N[v]).
 * Graphs above the vertex cap are accepted when the vertex order is an interval
 * order (see interval_log_z).
 */
LogWeight exact_log_z(const WeightedGraph& graph);

/*!
 * ln Z by Z_k = Z_{k-1} + w(k) Z_{j(k)} when the earlier neighbors of every
 * vertex k form the contiguous block j(k) .. k - 1; nullopt otherwise.
 */
std::optional<LogWeight> interval_log_z(const WeightedGraph& graph);
/// Uses the interval-graph recursion for single-type one-dimensional graphs, branching otherwise.
LogWeight exact_log_z(const HardCoreGraph& graph);

/// ln Z by summing over all 2^n vertex subsets; reference for small graphs (n <= 25).
LogWeight naive_log_z(const WeightedGraph& graph);

/*!
 * ln Z for one-dimensional single-type points with minimum distance sigma:
 * Z_k = Z_{k-1} + w Z_{j(k)} where j(k) counts positions x with x_k - x >= sigma.
 * Positions must be strictly increasing.
 */
LogWeight exact_log_z_1d(std::span<const double> positions, double sigma, double weight);

/// Occupation probability of every vertex under the hard-core distribution (n <= 25).
std::vector<double> exact_marginals(const WeightedGraph& graph);

struct StateProbability {
  std::uint64_t mask = 0;  ///< bit v set iff v is occupied
  double probability = 0.0;
};

/// Every independent set with its Gibbs probability, in increasing mask order (n <= 20).
std::vector<StateProbability> exact_distribution(const WeightedGraph& graph);

/// ln of the multiset partition function, Z(G, w / (1 - w)); weights must be < 1.
LogWeight multiset_log_z(const WeightedGraph& graph);

/// (D - 1)^(D - 1) / (D - 2)^D; +inf for D = 2.
double tree_threshold(std::size_t max_degree);

/*!
 * Exact sampler for one-dimensional single-type hard-core models.
 *
 * Runs the interval recursion once, then draws independent sets backwards
 * from the last position: position k is taken with probability
 * w Z_{j(k)} / Z_k, after which the walk continues at j(k). Runs of
 * rejected positions are skipped with one exponential draw against the
 * cumulative hazard.
 */
class IntervalSampler {
 public:
  IntervalSampler(std::vector<double> positions, double sigma, double weight);

  std::size_t size() const noexcept { return positions_.size(); }
  LogWeight log_z() const noexcept { return LogWeight::from_log(log_z_.back()); }
  /// Indices of occupied positions in increasing order.
  template <class Rng>
  std::vector<std::uint32_t> sample(Rng& rng) const;

 private:
  std::vector<double> positions_;
  std::vector<std::uint32_t> predecessor_;  // j(k) for k = 1..n, stored at k - 1
  // ln Z_k for k = 0..n. Since 1 - p_k = Z_{k-1} / Z_k, this is also the
  // cumulative hazard sum_{m <= k} -ln(1 - p_m).
  std::vector<double> log_z_;
};

template <class Rng>
std::vector<std::uint32_t> IntervalSampler::sample(Rng& rng) const {
  std::vector<std::uint32_t> taken;
  std::size_t k = positions_.size();
  while (k > 0) {
    // Smallest i <= k with log_z_[i] > log_z_[k] - E is the next taken position.
    const double target = log_z_[k] + std::log1p(-rng.uniform());
    if (target < 0.0) break;
    std::size_t lo = 1, hi = k;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (log_z_[mid] > target)
        hi = mid;
      else
        lo = mid + 1;
    }
    if (!(log_z_[lo] > target)) break;
    taken.push_back(static_cast<std::uint32_t>(lo - 1));
    k = predecessor_[lo - 1];
  }
  return {taken.rbegin(), taken.rend()};
}

}  // namespace hardgrid
