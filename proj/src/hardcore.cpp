#include "hardgrid/hardcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "hardgrid/discretize.hpp"
#include "hardgrid/errors.hpp"

namespace hardgrid {

WeightedGraph::WeightedGraph(std::size_t num_vertices,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                             std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.size() != num_vertices) throw PreconditionError("graph: one weight per vertex is required");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("graph: weights must be non-negative and finite");
  std::vector<std::vector<std::uint32_t>> adj(num_vertices);
  for (auto [u, v] : edges) {
    if (u >= num_vertices || v >= num_vertices) throw PreconditionError("graph: edge endpoint out of range");
    if (u == v) throw PreconditionError("graph: self-loops are not allowed");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  offsets_.assign(num_vertices + 1, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    neighbors_.insert(neighbors_.end(), list.begin(), list.end());
    offsets_[v + 1] = neighbors_.size();
  }
}

WeightedGraph WeightedGraph::from_csr(std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> neighbors,
                                      std::vector<double> weights) {
  if (offsets.size() != weights.size() + 1 || offsets.back() != neighbors.size())
    throw PreconditionError("graph: inconsistent CSR arrays");
  WeightedGraph g;
  g.offsets_ = std::move(offsets);
  g.neighbors_ = std::move(neighbors);
  g.weights_ = std::move(weights);
  return g;
}

std::size_t WeightedGraph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t v = 0; v < size(); ++v) best = std::max(best, degree(v));
  return best;
}

double WeightedGraph::max_weight() const noexcept {
  return weights_.empty() ? 0.0 : *std::max_element(weights_.begin(), weights_.end());
}

bool WeightedGraph::has_edge(std::size_t u, std::size_t v) const noexcept {
  const auto n = neighbors(u);
  return std::binary_search(n.begin(), n.end(), static_cast<std::uint32_t>(v));
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> WeightedGraph::edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::size_t v = 0; v < size(); ++v)
    for (std::uint32_t u : neighbors(v))
      if (v < u) out.emplace_back(static_cast<std::uint32_t>(v), u);
  return out;
}

WeightedGraph WeightedGraph::induced(std::span<const std::uint32_t> vertices) const {
  std::vector<std::int64_t> index(size(), -1);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (vertices[k] >= size()) throw PreconditionError("induced: vertex out of range");
    if (index[vertices[k]] >= 0) throw PreconditionError("induced: repeated vertex");
    index[vertices[k]] = static_cast<std::int64_t>(k);
  }
  std::vector<std::uint64_t> offsets(vertices.size() + 1, 0);
  std::vector<std::uint32_t> neighbors;
  std::vector<double> weights(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const std::size_t begin = neighbors.size();
    for (std::uint32_t u : this->neighbors(vertices[k]))
      if (index[u] >= 0) neighbors.push_back(static_cast<std::uint32_t>(index[u]));
    std::sort(neighbors.begin() + static_cast<std::ptrdiff_t>(begin), neighbors.end());
    offsets[k + 1] = neighbors.size();
    weights[k] = weights_[vertices[k]];
  }
  return from_csr(std::move(offsets), std::move(neighbors), std::move(weights));
}

WeightedGraph WeightedGraph::with_weights(std::vector<double> weights) const {
  if (weights.size() != size()) throw PreconditionError("with_weights: one weight per vertex is required");
  return from_csr(offsets_, neighbors_, std::move(weights));
}

namespace {

using Mask = std::uint64_t;

std::vector<Mask> adjacency_masks(const WeightedGraph& g, std::size_t cap, const char* what) {
  if (g.size() > cap)
    throw CapacityError(std::string(what) + ": " + std::to_string(g.size()) + " vertices exceed the cap of " +
                        std::to_string(cap));
  std::vector<Mask> adj(g.size(), 0);
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::uint32_t u : g.neighbors(v)) adj[v] |= Mask{1} << u;
  return adj;
}

struct Brancher {
  const std::vector<Mask>& adj;
  const std::vector<double>& w;

  LogWeight operator()(Mask mask) const {
    if (mask == 0) return LogWeight::one();
    int best = -1, best_deg = -1;
    for (Mask m = mask; m != 0; m &= m - 1) {
      const int v = std::countr_zero(m);
      const int deg = std::popcount(adj[static_cast<std::size_t>(v)] & mask);
      if (deg > best_deg) {
        best_deg = deg;
        best = v;
      }
    }
    if (best_deg == 0) {
      double acc = 0.0;
      for (Mask m = mask; m != 0; m &= m - 1) acc += std::log1p(w[static_cast<std::size_t>(std::countr_zero(m))]);
      return LogWeight::from_log(acc);
    }
    const auto v = static_cast<std::size_t>(best);
    const Mask bit = Mask{1} << v;
    return (*this)(mask & ~bit) + LogWeight::from_linear(w[v]) * (*this)(mask & ~(adj[v] | bit));
  }
};

Mask full_mask(std::size_t n) { return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

LogWeight log_z_1d_squared(std::span<const double> positions, double sigma2, double weight) {
  for (std::size_t k = 1; k < positions.size(); ++k)
    if (!(positions[k - 1] < positions[k])) throw PreconditionError("exact_log_z_1d: positions must be strictly increasing");
  if (!(weight >= 0.0)) throw PreconditionError("exact_log_z_1d: weight must be non-negative");
  const std::size_t n = positions.size();
  std::vector<double> log_z(n + 1, 0.0);
  std::size_t j = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = positions[k - 1];
    while (j < k - 1) {
      const double diff = x - positions[j];
      if (!(diff * diff >= sigma2)) break;
      ++j;
    }
    log_z[k] = weight == 0.0 ? log_z[k - 1] : log_z[k - 1] + std::log1p(weight * std::exp(log_z[j] - log_z[k - 1]));
  }
  return LogWeight::from_log(log_z[n]);
}

}  // namespace

std::optional<LogWeight> interval_log_z(const WeightedGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<double> log_z(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t first = k, earlier = 0;
    for (std::uint32_t u : graph.neighbors(k))
      if (u < k) {
        first = std::min<std::size_t>(first, u);
        ++earlier;
      }
    if (earlier != k - first) return std::nullopt;
    const double w = graph.weight(k);
    log_z[k + 1] = w == 0.0 ? log_z[k] : log_z[k] + std::log1p(w * std::exp(log_z[first] - log_z[k]));
  }
  return LogWeight::from_log(log_z[n]);
}

LogWeight exact_log_z(const WeightedGraph& graph) {
  if (graph.size() > kExactVertexCap)
    if (auto z = interval_log_z(graph)) return *z;
  const auto adj = adjacency_masks(graph, kExactVertexCap, "exact_log_z");
  return Brancher{adj, graph.weights()}(full_mask(graph.size()));
}

LogWeight exact_log_z(const HardCoreGraph& graph) {
  if (graph.points().dimension == 1 && graph.q() == 1) {
    std::vector<double> positions = graph.points().coords;
    std::sort(positions.begin(), positions.end());
    return log_z_1d_squared(positions, graph.threshold2(0, 0), graph.type_weights()[0]);
  }
  if (graph.num_vertices() > kExactVertexCap)
    throw CapacityError("exact_log_z: " + std::to_string(graph.num_vertices()) + " vertices exceed the cap of " +
                        std::to_string(kExactVertexCap));
  return exact_log_z(graph.to_weighted());
}

LogWeight naive_log_z(const WeightedGraph& graph) {
  const auto adj = adjacency_masks(graph, 25, "naive_log_z");
  const std::size_t n = graph.size();
  std::vector<double> logs;
  for (Mask s = 0; s < (Mask{1} << n); ++s) {
    bool independent = true;
    double lw = 0.0;
    for (Mask m = s; m != 0 && independent; m &= m - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(m));
      independent = (adj[v] & s) == 0;
      lw += std::log(graph.weight(v));
    }
    if (independent) logs.push_back(lw);
  }
  return LogWeight::from_log(log_sum_exp(logs));
}

LogWeight exact_log_z_1d(std::span<const double> positions, double sigma, double weight) {
  detail::require(sigma > 0.0, "exact_log_z_1d: sigma must be positive");
  return log_z_1d_squared(positions, sigma * sigma, weight);
}

std::vector<double> exact_marginals(const WeightedGraph& graph) {
  const auto adj = adjacency_masks(graph, 25, "exact_marginals");
  const Brancher z{adj, graph.weights()};
  const Mask all = full_mask(graph.size());
  const LogWeight total = z(all);
  std::vector<double> p(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    const LogWeight with_v = LogWeight::from_linear(graph.weight(v)) * z(all & ~(adj[v] | (Mask{1} << v)));
    p[v] = (with_v / total).linear();
  }
  return p;
}

std::vector<StateProbability> exact_distribution(const WeightedGraph& graph) {
  const auto adj = adjacency_masks(graph, 20, "exact_distribution");
  const std::size_t n = graph.size();
  std::vector<StateProbability> states;
  std::vector<double> logs;
  for (Mask s = 0; s < (Mask{1} << n); ++s) {
    bool independent = true;
    double lw = 0.0;
    for (Mask m = s; m != 0 && independent; m &= m - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(m));
      independent = (adj[v] & s) == 0;
      lw += std::log(graph.weight(v));
    }
    if (independent && std::isfinite(lw)) {
      states.push_back({s, 0.0});
      logs.push_back(lw);
    }
  }
  const double log_total = log_sum_exp(logs);
  for (std::size_t k = 0; k < states.size(); ++k) states[k].probability = std::exp(logs[k] - log_total);
  return states;
}

LogWeight multiset_log_z(const WeightedGraph& graph) {
  std::vector<double> w(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    const double x = graph.weight(v);
    if (!(x < 1.0)) throw PreconditionError("multiset_log_z: every weight must be < 1 for the series to converge");
    w[v] = x / (1.0 - x);
  }
  return exact_log_z(graph.with_weights(std::move(w)));
}

double tree_threshold(std::size_t max_degree) {
  detail::require(max_degree >= 2, "tree_threshold: maximum degree must be >= 2");
  if (max_degree == 2) return std::numeric_limits<double>::infinity();
  const auto d = static_cast<double>(max_degree);
  return std::exp((d - 1.0) * std::log(d - 1.0) - d * std::log(d - 2.0));
}

IntervalSampler::IntervalSampler(std::vector<double> positions, double sigma, double weight)
    : positions_(std::move(positions)) {
  detail::require(sigma > 0.0, "IntervalSampler: sigma must be positive");
  detail::require(weight >= 0.0, "IntervalSampler: weight must be non-negative");
  for (std::size_t k = 1; k < positions_.size(); ++k)
    if (!(positions_[k - 1] < positions_[k])) throw PreconditionError("IntervalSampler: positions must be strictly increasing");
  const std::size_t n = positions_.size();
  const double sigma2 = sigma * sigma;
  predecessor_.resize(n);
  log_z_.assign(n + 1, 0.0);
  std::size_t j = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = positions_[k - 1];
    while (j < k - 1) {
      const double diff = x - positions_[j];
      if (!(diff * diff >= sigma2)) break;
      ++j;
    }
    predecessor_[k - 1] = static_cast<std::uint32_t>(j);
    if (weight == 0.0) {
      log_z_[k] = log_z_[k - 1];
      continue;
    }
    log_z_[k] = log_z_[k - 1] + std::log1p(weight * std::exp(log_z_[j] - log_z_[k - 1]));
  }
}

}  // namespace hardgrid
