#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardgrid/hardcore.hpp"
#include "hardgrid/rng.hpp"

namespace hardgrid {

/// Independent set as an occupancy array with per-vertex counts of occupied neighbors.
class ChainState {
 public:
  ChainState(std::size_t num_vertices, std::uint64_t seed, std::uint64_t stream = 0);

  std::size_t size() const noexcept { return occupied_.size(); }
  bool occupied(std::size_t v) const noexcept { return occupied_[v] != 0; }
  std::uint32_t blocked(std::size_t v) const noexcept { return blocked_[v]; }
  std::vector<std::uint32_t> occupied_vertices() const;
  /// Bit v set iff v is occupied; requires at most 64 vertices.
  std::uint64_t mask() const;
  Rng& rng() noexcept { return rng_; }

  /// True iff the occupancy is an independent set and every blocked count matches it.
  bool is_consistent(const WeightedGraph& graph) const;

  void add(const WeightedGraph& graph, std::size_t v);
  void remove(const WeightedGraph& graph, std::size_t v);

 private:
  std::vector<std::uint8_t> occupied_;
  std::vector<std::uint32_t> blocked_;
  Rng rng_;
};

/*!
 * One Glauber update: pick v uniformly; with probability 1 / (1 + w(v))
 * make v unoccupied, otherwise occupy v if none of its neighbors is occupied.
 */
void glauber_step(ChainState& state, const WeightedGraph& graph);

/// Unrounded schedule C n (n ln max(D, 2) + ln(1 / eps_s)).
double schedule_length(std::size_t num_vertices, std::size_t max_degree, double eps_s, double constant = 1.0);
/// Step count: the schedule length rounded up.
std::uint64_t schedule_steps(std::size_t num_vertices, std::size_t max_degree, double eps_s, double constant = 1.0);

struct RegimeCheck {
  bool satisfied = false;
  std::string detail;
};

/// Max weight below the tree threshold of the max degree, or a certified clique witness supplied.
RegimeCheck check_regime(const WeightedGraph& graph, bool clique_certified = false);

struct SampleOptions {
  double constant = 1.0;                 ///< schedule constant C
  std::optional<std::uint64_t> steps;    ///< overrides the schedule when set
  bool clique_certified = false;         ///< a verified clique-condition witness exists for the model
};

struct SampleResult {
  std::vector<std::uint32_t> occupied;  ///< sorted vertex ids
  std::uint64_t steps = 0;
  RegimeCheck regime;
};

/// Runs the chain from the empty set for the scheduled number of steps and returns the final state.
SampleResult sample(const WeightedGraph& graph, double eps_s, std::uint64_t seed, const SampleOptions& options = {});

/// Runs the chain from the empty set and leaves the final state in place.
void run_chain(ChainState& state, const WeightedGraph& graph, std::uint64_t steps);

struct UnoccupiedEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Fraction of independent restarts that end with v unoccupied, with the standard error of the mean.
UnoccupiedEstimate estimate_unoccupied(const WeightedGraph& graph, std::size_t v, std::size_t samples, double eps_s,
                                       std::uint64_t seed, const SampleOptions& options = {});

}  // namespace hardgrid
