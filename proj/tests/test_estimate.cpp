#include <cmath>
#include <random>

#include "doctest.h"
#include "hardgrid/errors.hpp"
#include "hardgrid/estimate.hpp"
#include "hardgrid/parallel.hpp"
#include "oracles.hpp"

using namespace hardgrid;
using doctest::Approx;

TEST_CASE("telescoping order") {
  const WeightedGraph g(4, {{0, 1}, {1, 2}, {1, 3}, {2, 3}}, {1, 1, 1, 1});
  CHECK(telescoping_order(g) == std::vector<std::uint32_t>{1, 2, 3, 0});
}

TEST_CASE("telescoping with exact ratios reproduces ln Z") {
  std::mt19937_64 gen(15);
  for (int t = 0; t < 30; ++t) {
    const auto og = oracle::random_geometric(gen, 2, 1 + t % 14, 0.4, 1.5);
    const auto g = og.build();
    const auto order = telescoping_order(g);
    double acc = 0.0;
    for (std::size_t k = 1; k <= order.size(); ++k) {
      const auto gk = g.induced(std::span(order).first(k));
      acc -= std::log1p(-exact_marginals(gk)[k - 1]);
    }
    CHECK(acc == Approx(oracle::log_z(og)).epsilon(1e-10));
  }
}

TEST_CASE("recursion examples") {
  CHECK(weitz_occupation_ratio(WeightedGraph(1, {}, {0.7}), 0, 5) == Approx(0.7));
  const WeightedGraph edge(2, {{0, 1}}, {1.0, 1.0});
  CHECK(weitz_occupation_ratio(edge, 0, 1) == Approx(0.5));
  CHECK(weitz_occupation_ratio(edge, 0, 0) == Approx(1.0));
  const double r = weitz_occupation_ratio(edge, 0, 3);
  CHECK(r / (1 + r) == Approx(1.0 / 3));
}

TEST_CASE("full-depth recursion gives exact occupation ratios") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 40; ++t) {
    const auto og = oracle::random_geometric(gen, 2, 2 + t % 9, 0.5, 2.0);
    const auto marg = oracle::marginals(og);
    const auto g = og.build();
    for (std::size_t v = 0; v < og.n; ++v) {
      const double ratio = weitz_occupation_ratio(g, v, og.n);
      CHECK(ratio == Approx(marg[v] / (1 - marg[v])).epsilon(1e-10));
    }
  }
}

TEST_CASE("deterministic estimator") {
  const auto e = estimate_log_z_weitz(WeightedGraph(6, {}, std::vector<double>(6, 0.4)), 0.05);
  CHECK(e.log_z.log() == Approx(6 * std::log1p(0.4)).epsilon(1e-14));
  std::mt19937_64 gen(31);
  for (int t = 0; t < 20; ++t) {
    const auto tree = oracle::random_tree(gen, 2 + t % 11, 1.0);
    const auto est = estimate_log_z_weitz(tree.build(), 1e-12);
    CHECK(est.log_z.log() == Approx(oracle::log_z(tree)).epsilon(1e-9));
  }
  for (int t = 0; t < 10; ++t) {
    auto og = oracle::random_geometric(gen, 2, 12, 0.35, 1.0);
    const double lc = oracle::tree_threshold(og.max_degree());
    for (auto& w : og.w) w = std::min(w, 0.9 * lc);
    const auto est = estimate_log_z_weitz(og.build(), 0.05);
    CHECK(std::abs(est.log_z.log() - oracle::log_z(og)) <= 0.05);
    CHECK(est.regime.satisfied);
  }
}

TEST_CASE("randomized estimator") {
  SUBCASE("edgeless graph") {
    const WeightedGraph g(5, {}, std::vector<double>(5, 1.0));
    int hits = 0;
    for (int r = 0; r < 20; ++r)
      hits += std::abs(estimate_log_z_mcmc(g, 0.1, 1000 + r).log_z.log() - std::log(32.0)) <= 0.1;
    CHECK(hits >= 15);
  }
  SUBCASE("triangle") {
    const WeightedGraph g(3, {{0, 1}, {1, 2}, {0, 2}}, {1, 1, 1});
    const auto e = estimate_log_z_mcmc(g, 0.2, 9);
    CHECK(std::abs(e.log_z.log() - std::log(4.0)) <= 0.2);
    CHECK(e.restarts == 64 * 3 * 25);
    CHECK(e.ratios.size() == 3);
  }
  SUBCASE("undersampled ratio") {
    McmcOptions o;
    o.restarts = 8;
    try {
      estimate_log_z_mcmc(WeightedGraph(1, {}, {1e9}), 0.5, 1, o);
      CHECK(false);
    } catch (const UndersampledError& e) {
      CHECK(e.index() == 1);
    }
  }
}

TEST_CASE("estimators are independent of the thread count") {
  std::mt19937_64 gen(44);
  const auto g = oracle::random_geometric(gen, 2, 10, 0.4, 1.0).build();
  McmcOptions o;
  o.restarts = 400;
  set_thread_count(1);
  const auto a = estimate_log_z_mcmc(g, 0.3, 5, o);
  const auto wa = estimate_log_z_weitz(g, 0.01);
  set_thread_count(4);
  const auto b = estimate_log_z_mcmc(g, 0.3, 5, o);
  const auto wb = estimate_log_z_weitz(g, 0.01);
  set_thread_count(0);
  CHECK(a.log_z.log() == b.log_z.log());
  CHECK(a.ratios == b.ratios);
  CHECK(wa.log_z.log() == wb.log_z.log());
}
