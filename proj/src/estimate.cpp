#include "hardgrid/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "hardgrid/errors.hpp"
#include "hardgrid/parallel.hpp"

namespace hardgrid {

std::vector<std::uint32_t> telescoping_order(const WeightedGraph& graph) {
  std::vector<std::uint32_t> order(graph.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return graph.degree(a) > graph.degree(b); });
  return order;
}

namespace {

double median_of_means(const std::uint8_t* values, std::size_t count, std::size_t groups) {
  groups = std::clamp<std::size_t>(groups, 1, count);
  std::vector<double> means(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t begin = g * count / groups, end = (g + 1) * count / groups;
    std::size_t hits = 0;
    for (std::size_t k = begin; k < end; ++k) hits += values[k];
    means[g] = static_cast<double>(hits) / static_cast<double>(end - begin);
  }
  std::sort(means.begin(), means.end());
  return groups % 2 == 1 ? means[groups / 2] : 0.5 * (means[groups / 2 - 1] + means[groups / 2]);
}

}  // namespace

McmcEstimate estimate_log_z_mcmc(const WeightedGraph& graph, double eps_a, std::uint64_t seed,
                                 const McmcOptions& options) {
  detail::require(graph.size() > 0, "estimate_log_z_mcmc: graph must be nonempty");
  detail::require(eps_a > 0.0 && eps_a <= 1.0, "estimate_log_z_mcmc: eps_a must lie in (0, 1]");
  const std::size_t n = graph.size();
  McmcEstimate out;
  out.regime = check_regime(graph, options.clique_certified);
  out.order = telescoping_order(graph);
  out.restarts = options.restarts ? *options.restarts
                                  : static_cast<std::size_t>(std::ceil(64.0 * static_cast<double>(n) / (eps_a * eps_a)));
  detail::require(out.restarts >= 1, "estimate_log_z_mcmc: at least one restart is required");
  const double eps_ratio = eps_a / (8.0 * static_cast<double>(n));

  std::vector<WeightedGraph> prefixes(n);
  std::vector<std::uint64_t> steps(n);
  for (std::size_t k = 1; k <= n; ++k) {
    prefixes[k - 1] = graph.induced(std::span(out.order).first(k));
    steps[k - 1] = schedule_steps(k, prefixes[k - 1].max_degree(), eps_ratio, options.constant);
    out.total_steps += steps[k - 1] * out.restarts;
  }

  const std::size_t s = out.restarts;
  std::vector<std::uint8_t> free(n * s);
  parallel_for(n * s, [&](std::size_t task) {
    const std::size_t k = task / s, r = task % s;
    const WeightedGraph& g = prefixes[k];
    ChainState state(g.size(), seed, stream_key(k + 1, r));
    run_chain(state, g, steps[k]);
    free[task] = state.occupied(k) ? 0 : 1;
  });

  double log_z = 0.0;
  out.ratios.resize(n);
  out.std_errors.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint8_t* block = free.data() + k * s;
    const double p = median_of_means(block, s, options.groups);
    if (p == 0.0)
      throw UndersampledError(k + 1, "estimate_log_z_mcmc: ratio " + std::to_string(k + 1) +
                                         " estimated as zero; increase the number of restarts");
    const double mean = static_cast<double>(std::accumulate(block, block + s, std::size_t{0})) / static_cast<double>(s);
    out.ratios[k] = p;
    out.std_errors[k] = std::sqrt(mean * (1.0 - mean) / static_cast<double>(s));
    log_z -= std::log(p);
  }
  out.log_z = LogWeight::from_log(log_z);
  return out;
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct MemoKey {
  Bits alive;
  std::uint32_t v;
  std::uint32_t depth;
  bool operator==(const MemoKey&) const = default;
};

struct MemoHash {
  std::size_t operator()(const MemoKey& k) const noexcept {
    std::uint64_t h = stream_key(k.v, k.depth);
    for (std::uint64_t w : k.alive) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

bool test(const Bits& b, std::size_t v) { return (b[v >> 6] >> (v & 63)) & 1u; }
void set(Bits& b, std::size_t v) { b[v >> 6] |= std::uint64_t{1} << (v & 63); }
void clear(Bits& b, std::size_t v) { b[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }

class BudgetExceeded {};

class WeitzSolver {
 public:
  WeitzSolver(const WeightedGraph& graph, std::uint64_t budget) : g_(graph), budget_(budget) {}

  /// R for v in the subgraph induced on `alive` (which must contain v).
  double ratio(const Bits& alive, std::size_t v, std::size_t depth) {
    if (depth == 0) return g_.weight(v);
    Bits comp = component(alive, v);
    const std::size_t size = count(comp);
    const auto capped = static_cast<std::uint32_t>(std::min(depth, size));
    MemoKey key{std::move(comp), static_cast<std::uint32_t>(v), capped};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (++evaluations_ > budget_) throw BudgetExceeded{};

    Bits rest = key.alive;
    clear(rest, v);
    double product = 1.0;
    for (std::uint32_t u : g_.neighbors(v)) {
      if (!test(rest, u)) continue;
      product /= 1.0 + ratio(rest, u, capped - 1);
      clear(rest, u);
    }
    const double r = g_.weight(v) * product;
    memo_.emplace(std::move(key), r);
    return r;
  }

  std::uint64_t evaluations() const noexcept { return evaluations_; }

 private:
  Bits component(const Bits& alive, std::size_t v) const {
    Bits comp(alive.size(), 0);
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(v)};
    set(comp, v);
    while (!stack.empty()) {
      const std::uint32_t x = stack.back();
      stack.pop_back();
      for (std::uint32_t u : g_.neighbors(x))
        if (test(alive, u) && !test(comp, u)) {
          set(comp, u);
          stack.push_back(u);
        }
    }
    return comp;
  }

  static std::size_t count(const Bits& b) {
    std::size_t c = 0;
    for (std::uint64_t w : b) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  const WeightedGraph& g_;
  std::uint64_t budget_;
  std::uint64_t evaluations_ = 0;
  std::unordered_map<MemoKey, double, MemoHash> memo_;
};

Bits all_alive(std::size_t n) {
  Bits b((n + 63) / 64, 0);
  for (std::size_t v = 0; v < n; ++v) set(b, v);
  return b;
}

}  // namespace

double weitz_occupation_ratio(const WeightedGraph& graph, std::size_t v, std::size_t depth) {
  detail::require(v < graph.size(), "weitz_occupation_ratio: vertex out of range");
  WeitzSolver solver(graph, std::numeric_limits<std::uint64_t>::max());
  return solver.ratio(all_alive(graph.size()), v, depth);
}

WeitzEstimate estimate_log_z_weitz(const WeightedGraph& graph, double eps_a, const WeitzOptions& options) {
  detail::require(eps_a > 0.0, "estimate_log_z_weitz: eps_a must be positive");
  detail::require(options.start_depth >= 1, "estimate_log_z_weitz: start depth must be >= 1");
  const std::size_t n = graph.size();
  WeitzEstimate out;
  out.regime = check_regime(graph);
  if (n == 0) {
    out.log_z = LogWeight::one();
    out.converged = out.exact = true;
    return out;
  }
  const auto order = telescoping_order(graph);
  // Contiguous chunks of k share one memo table across all depths. The chunk count is fixed so the
  // budget and memo reuse, and hence the returned depth, do not depend on the thread count.
  constexpr std::size_t kChunks = 8;
  const std::size_t chunks = std::min(kChunks, n);
  std::vector<WeitzSolver> solvers;
  const std::uint64_t budget = options.max_evaluations / chunks + 1;
  for (std::size_t c = 0; c < chunks; ++c) solvers.emplace_back(graph, budget);

  auto log_z_at = [&](std::size_t depth) {
    std::vector<double> terms(n);
    parallel_for(chunks, [&](std::size_t c) {
      Bits alive((n + 63) / 64, 0);
      const std::size_t begin = c * n / chunks, end = (c + 1) * n / chunks;
      for (std::size_t k = 0; k < begin; ++k) set(alive, order[k]);
      for (std::size_t k = begin; k < end; ++k) {
        set(alive, order[k]);
        terms[k] = std::log1p(solvers[c].ratio(alive, order[k], depth));
      }
    });
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
  };

  std::size_t depth = options.start_depth;
  try {
    double current = log_z_at(depth);
    out.history.push_back(current);
    out.log_z = LogWeight::from_log(current);
    out.depth = depth;
    while (depth < n && depth < options.max_depth) {
      const std::size_t next_depth = std::min(2 * depth, options.max_depth);
      const double next = log_z_at(next_depth);
      out.history.push_back(next);
      out.log_z = LogWeight::from_log(next);
      out.depth = depth = next_depth;
      if (std::abs(next - current) < eps_a / 2.0) {
        out.converged = true;
        break;
      }
      current = next;
    }
    if (depth >= n) out.converged = out.exact = true;
    out.detail = out.converged ? "converged at depth " + std::to_string(depth)
                               : "depth cap " + std::to_string(options.max_depth) + " reached without convergence";
  } catch (const BudgetExceeded&) {
    if (out.history.empty())
      throw CapacityError("estimate_log_z_weitz: evaluation budget exhausted at the starting depth");
    out.converged = false;
    out.detail = "evaluation budget exhausted after depth " + std::to_string(out.depth) + "; returning partial result";
  }
  return out;
}

}  // namespace hardgrid
