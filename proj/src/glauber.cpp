#include "hardgrid/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardgrid/errors.hpp"
#include "hardgrid/parallel.hpp"

namespace hardgrid {

ChainState::ChainState(std::size_t num_vertices, std::uint64_t seed, std::uint64_t stream)
    : occupied_(num_vertices, 0), blocked_(num_vertices, 0), rng_(seed, stream) {}

std::vector<std::uint32_t> ChainState::occupied_vertices() const {
  std::vector<std::uint32_t> out;
  for (std::size_t v = 0; v < occupied_.size(); ++v)
    if (occupied_[v]) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

std::uint64_t ChainState::mask() const {
  detail::require(occupied_.size() <= 64, "ChainState::mask: more than 64 vertices");
  std::uint64_t m = 0;
  for (std::size_t v = 0; v < occupied_.size(); ++v)
    if (occupied_[v]) m |= std::uint64_t{1} << v;
  return m;
}

bool ChainState::is_consistent(const WeightedGraph& graph) const {
  if (graph.size() != occupied_.size()) return false;
  for (std::size_t v = 0; v < occupied_.size(); ++v) {
    std::uint32_t count = 0;
    for (std::uint32_t u : graph.neighbors(v)) count += occupied_[u];
    if (count != blocked_[v]) return false;
    if (occupied_[v] && count != 0) return false;
  }
  return true;
}

void ChainState::add(const WeightedGraph& graph, std::size_t v) {
  occupied_[v] = 1;
  for (std::uint32_t u : graph.neighbors(v)) ++blocked_[u];
}

void ChainState::remove(const WeightedGraph& graph, std::size_t v) {
  occupied_[v] = 0;
  for (std::uint32_t u : graph.neighbors(v)) --blocked_[u];
}

void glauber_step(ChainState& state, const WeightedGraph& graph) {
  Rng& rng = state.rng();
  const std::size_t v = rng.below(graph.size());
  const double u = rng.uniform();
  if (u * (1.0 + graph.weight(v)) < 1.0) {
    if (state.occupied(v)) state.remove(graph, v);
  } else if (!state.occupied(v) && state.blocked(v) == 0) {
    state.add(graph, v);
  }
}

void run_chain(ChainState& state, const WeightedGraph& graph, std::uint64_t steps) {
  if (graph.size() == 0) return;
  for (std::uint64_t t = 0; t < steps; ++t) glauber_step(state, graph);
}

double schedule_length(std::size_t num_vertices, std::size_t max_degree, double eps_s, double constant) {
  detail::require(eps_s > 0.0 && eps_s <= 1.0, "schedule: eps_s must lie in (0, 1]");
  const auto n = static_cast<double>(num_vertices);
  const double delta = static_cast<double>(std::max<std::size_t>(max_degree, 2));
  return constant * n * (n * std::log(delta) + std::log(1.0 / eps_s));
}

std::uint64_t schedule_steps(std::size_t num_vertices, std::size_t max_degree, double eps_s, double constant) {
  return static_cast<std::uint64_t>(std::ceil(schedule_length(num_vertices, max_degree, eps_s, constant)));
}

RegimeCheck check_regime(const WeightedGraph& graph, bool clique_certified) {
  RegimeCheck out;
  const std::size_t delta = graph.max_degree();
  const double wmax = graph.max_weight();
  std::ostringstream msg;
  if (delta < 2) {
    out.satisfied = true;
    msg << "max degree " << delta << " < 2: no tree threshold applies";
  } else {
    const double threshold = tree_threshold(delta);
    out.satisfied = wmax < threshold;
    msg << "tree-threshold condition w_max < lambda_c(" << delta << ") " << (out.satisfied ? "holds" : "fails")
        << ": " << wmax << (out.satisfied ? " < " : " >= ") << threshold;
  }
  if (!out.satisfied && clique_certified) {
    out.satisfied = true;
    msg << "; clique-condition witness supplied";
  }
  out.detail = msg.str();
  return out;
}

SampleResult sample(const WeightedGraph& graph, double eps_s, std::uint64_t seed, const SampleOptions& options) {
  SampleResult out;
  out.regime = check_regime(graph, options.clique_certified);
  out.steps = options.steps ? *options.steps : schedule_steps(graph.size(), graph.max_degree(), eps_s, options.constant);
  ChainState state(graph.size(), seed);
  run_chain(state, graph, out.steps);
  out.occupied = state.occupied_vertices();
  return out;
}

UnoccupiedEstimate estimate_unoccupied(const WeightedGraph& graph, std::size_t v, std::size_t samples, double eps_s,
                                       std::uint64_t seed, const SampleOptions& options) {
  detail::require(samples >= 1, "estimate_unoccupied: at least one sample is required");
  detail::require(v < graph.size(), "estimate_unoccupied: vertex out of range");
  const std::uint64_t steps =
      options.steps ? *options.steps : schedule_steps(graph.size(), graph.max_degree(), eps_s, options.constant);
  std::vector<std::uint8_t> free(samples);
  parallel_for(samples, [&](std::size_t r) {
    ChainState state(graph.size(), seed, stream_key(v, r));
    run_chain(state, graph, steps);
    free[r] = state.occupied(v) ? 0 : 1;
  });
  std::size_t hits = 0;
  for (auto f : free) hits += f;
  UnoccupiedEstimate out;
  out.samples = samples;
  out.mean = static_cast<double>(hits) / static_cast<double>(samples);
  if (samples > 1) {
    const double var = out.mean * (1.0 - out.mean) * static_cast<double>(samples) / static_cast<double>(samples - 1);
    out.std_error = std::sqrt(var / static_cast<double>(samples));
  }
  return out;
}

}  // namespace hardgrid
