#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardgrid/glauber.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/log_weight.hpp"

namespace hardgrid {

/// Vertices by descending degree, ties broken by index.
std::vector<std::uint32_t> telescoping_order(const WeightedGraph& graph);

struct McmcOptions {
  double constant = 1.0;                    ///< schedule constant C
  std::optional<std::size_t> restarts;      ///< per-ratio restarts; default ceil(64 n / eps_a^2)
  std::size_t groups = 8;                   ///< median-of-means groups
  bool clique_certified = false;
};

struct McmcEstimate {
  LogWeight log_z;
  std::vector<std::uint32_t> order;
  std::vector<double> ratios;      ///< estimate of Pr[v_k unoccupied] in G_k
  std::vector<double> std_errors;  ///< standard error of the plain mean of each ratio
  std::size_t restarts = 0;
  std::uint64_t total_steps = 0;
  RegimeCheck regime;
};

/*!
 * ln Z = -sum_k ln Pr_{G_k}[v_k unoccupied] with G_k induced on the first k
 * vertices of the telescoping order. Each probability is a median of group
 * means over independent Glauber restarts run at total-variation budget
 * eps_a / (8 n). Throws UndersampledError if a ratio estimate is zero.
 */
McmcEstimate estimate_log_z_mcmc(const WeightedGraph& graph, double eps_a, std::uint64_t seed,
                                 const McmcOptions& options = {});

/*!
 * Truncated self-avoiding-walk recursion R_G(v) = w(v) prod_i 1 / (1 + R_{G_i}(u_i))
 * where u_1 < u_2 < ... are the neighbors of v and G_i = G - v - {u_1, ..., u_{i-1}}.
 * At depth 0 the children are cut (R = 0 beyond the horizon), giving w(v).
 */
double weitz_occupation_ratio(const WeightedGraph& graph, std::size_t v, std::size_t depth);

struct WeitzOptions {
  std::size_t start_depth = 4;
  std::size_t max_depth = 64;
  std::uint64_t max_evaluations = 50'000'000;  ///< recursion budget across all depths
};

struct WeitzEstimate {
  LogWeight log_z;
  std::size_t depth = 0;        ///< depth of the returned estimate
  bool converged = false;       ///< successive depths agreed within eps_a / 2
  bool exact = false;           ///< depth reached the graph size, so the recursion is exact
  std::vector<double> history;  ///< ln Z at depths start, 2 start, ...
  std::string detail;
  RegimeCheck regime;
};

/// Deterministic ln Z via the recursion, doubling the depth until successive estimates agree.
WeitzEstimate estimate_log_z_weitz(const WeightedGraph& graph, double eps_a, const WeitzOptions& options = {});

}  // namespace hardgrid
