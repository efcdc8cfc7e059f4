#include <cmath>
#include <random>

#include "doctest.h"
#include "hardgrid/errors.hpp"
#include "hardgrid/glauber.hpp"
#include "hardgrid/parallel.hpp"
#include "oracles.hpp"

using namespace hardgrid;
using doctest::Approx;

namespace {

/// Transition matrix of the single-site kernel written from its definition.
std::vector<std::vector<double>> kernel(const oracle::Graph& g) {
  const auto adj = g.adjacency();
  const std::size_t states = std::size_t{1} << g.n;
  std::vector<std::vector<double>> p(states, std::vector<double>(states, 0.0));
  for (std::uint64_t s = 0; s < states; ++s) {
    bool independent = true;
    for (std::size_t v = 0; v < g.n; ++v)
      if ((s >> v & 1) && (adj[v] & s)) independent = false;
    if (!independent) continue;
    for (std::size_t v = 0; v < g.n; ++v) {
      const double pick = 1.0 / static_cast<double>(g.n), w = g.w[v];
      const std::uint64_t bit = std::uint64_t{1} << v;
      p[s][s & ~bit] += pick / (1.0 + w);
      if ((adj[v] & s) == 0)
        p[s][s | bit] += pick * w / (1.0 + w);
      else
        p[s][s] += pick * w / (1.0 + w);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("single vertex chain") {
  const WeightedGraph g(1, {}, {1.0});
  ChainState state(1, 5);
  int occupied = 0;
  const int steps = 100000;
  for (int t = 0; t < steps; ++t) {
    glauber_step(state, g);
    occupied += state.occupied(0);
  }
  const double mean = static_cast<double>(occupied) / steps;
  CHECK(std::abs(mean - 0.5) <= 3.0 * std::sqrt(0.25 / steps));
}

TEST_CASE("zero weights absorb at the empty set") {
  const WeightedGraph g(3, {{0, 1}}, {0.0, 0.0, 0.0});
  ChainState state(3, 1);
  state.add(g, 2);
  for (int t = 0; t < 1000; ++t) glauber_step(state, g);
  CHECK(state.occupied_vertices().empty());
}

TEST_CASE("the library kernel matches the definition and is reversible") {
  std::mt19937_64 gen(41);
  for (int t = 0; t < 6; ++t) {
    const auto g = oracle::random_geometric(gen, 1, 2 + t % 3, 0.6, 2.0);
    const auto p = kernel(g);
    const auto mu = oracle::distribution(g);
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b) CHECK(mu[a] * p[a][b] == Approx(mu[b] * p[b][a]).epsilon(1e-12));

    const auto wg = g.build();
    for (std::uint64_t s = 0; s < p.size(); ++s) {
      if (mu[s] == 0.0) continue;
      std::vector<std::uint64_t> counts(p.size(), 0);
      const int draws = 20000;
      for (int r = 0; r < draws; ++r) {
        ChainState state(g.n, 1000 + t, stream_key(s, r));
        for (std::size_t v = 0; v < g.n; ++v)
          if (s >> v & 1) state.add(wg, v);
        glauber_step(state, wg);
        ++counts[state.mask()];
      }
      for (std::size_t b = 0; b < p.size(); ++b) {
        const double sd = std::sqrt(p[s][b] * (1 - p[s][b]) / draws);
        CHECK(std::abs(static_cast<double>(counts[b]) / draws - p[s][b]) <= 5.0 * sd + 1e-12);
      }
    }
  }
}

TEST_CASE("states stay independent") {
  std::mt19937_64 gen(2);
  const auto g = oracle::random_geometric(gen, 2, 40, 0.25, 3.0).build();
  ChainState state(g.size(), 9);
  bool ok = true;
  for (int t = 0; t < 1000000 && ok; ++t) {
    glauber_step(state, g);
    if (t % 97 == 0) ok = state.is_consistent(g);
  }
  CHECK(ok);
  CHECK(state.is_consistent(g));
}

TEST_CASE("schedule") {
  const double a = schedule_length(10, 4, 0.2), b = schedule_length(10, 4, 0.1);
  CHECK(b - a == Approx(10 * std::log(2.0)));
  CHECK(schedule_length(10, 4, 0.1, 2.0) == Approx(2.0 * b));
  CHECK(schedule_length(10, 0, 0.1) == schedule_length(10, 2, 0.1));
  CHECK(schedule_steps(10, 4, 0.1) == static_cast<std::uint64_t>(std::ceil(b)));
}

TEST_CASE("samples follow the Gibbs distribution") {
  SUBCASE("edgeless") {
    oracle::Graph g;
    g.n = 5;
    g.w.assign(5, 1.0);
    const auto wg = g.build();
    std::vector<std::uint64_t> counts(32, 0);
    for (int s = 0; s < 100000; ++s) {
      std::uint64_t mask = 0;
      for (auto v : sample(wg, 0.1, stream_key(1, s)).occupied) mask |= std::uint64_t{1} << v;
      ++counts[mask];
    }
    CHECK(oracle::chi_square_pvalue(counts, oracle::distribution(g)) > 1e-3);
  }
  SUBCASE("path of three vertices") {
    oracle::Graph g;
    g.n = 3;
    g.w.assign(3, 1.0);
    g.edges = {{0, 1}, {1, 2}};
    const auto probs = oracle::distribution(g);
    CHECK(probs[0b101] == Approx(0.2));
    const auto wg = g.build();
    const int n = 100000;
    auto frequencies = [&](const SampleOptions& o) {
      std::vector<double> f(8, 0.0);
      for (int s = 0; s < n; ++s) {
        std::uint64_t mask = 0;
        for (auto v : sample(wg, 0.1, stream_key(2, s), o).occupied) mask |= std::uint64_t{1} << v;
        f[mask] += 1.0 / n;
      }
      return f;
    };
    const auto scheduled = frequencies({});
    double tv = 0.0;
    for (int m = 0; m < 8; ++m) tv += std::abs(scheduled[m] - probs[m]) / 2.0;
    CHECK(tv <= 0.1);
    SampleOptions long_run;
    long_run.steps = 1000;
    const auto mixed = frequencies(long_run);
    for (std::uint64_t m : {0b000, 0b001, 0b010, 0b100, 0b101})
      CHECK(std::abs(mixed[m] - 0.2) <= 3.0 * std::sqrt(0.16 / n));
  }
}

TEST_CASE("unoccupied estimates") {
  auto e = estimate_unoccupied(WeightedGraph(1, {}, {1.0}), 0, 20000, 0.1, 3);
  CHECK(std::abs(e.mean - 0.5) <= 4 * e.std_error);
  e = estimate_unoccupied(WeightedGraph(2, {{0, 1}}, {1.0, 1.0}), 0, 20000, 0.1, 3);
  CHECK(std::abs(e.mean - 2.0 / 3) <= 4 * e.std_error);
  e = estimate_unoccupied(WeightedGraph(2, {{0, 1}}, {0.0, 1.0}), 0, 500, 0.1, 3);
  CHECK(e.mean == 1.0);
  CHECK_THROWS_AS(estimate_unoccupied(WeightedGraph(1, {}, {1.0}), 0, 0, 0.1, 3), PreconditionError);
}

TEST_CASE("results do not depend on the thread count") {
  std::mt19937_64 gen(6);
  const auto g = oracle::random_geometric(gen, 2, 12, 0.4, 1.0).build();
  set_thread_count(1);
  const auto a = estimate_unoccupied(g, 3, 3000, 0.1, 77);
  const auto sa = sample(g, 0.1, 5).occupied;
  set_thread_count(3);
  const auto b = estimate_unoccupied(g, 3, 3000, 0.1, 77);
  const auto sb = sample(g, 0.1, 5).occupied;
  set_thread_count(0);
  CHECK(a.mean == b.mean);
  CHECK(sa == sb);
}

TEST_CASE("regime check") {
  const WeightedGraph star(4, {{0, 1}, {0, 2}, {0, 3}}, {3.9, 3.9, 3.9, 3.9});
  CHECK(check_regime(star).satisfied);
  const WeightedGraph heavy(4, {{0, 1}, {0, 2}, {0, 3}}, {4.1, 1, 1, 1});
  CHECK_FALSE(check_regime(heavy).satisfied);
  CHECK(check_regime(heavy, true).satisfied);
  CHECK_FALSE(sample(heavy, 0.1, 1).regime.satisfied);
}
