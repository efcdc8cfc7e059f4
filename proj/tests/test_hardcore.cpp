#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "hardgrid/discretize.hpp"
#include "hardgrid/errors.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/rng.hpp"
#include "oracles.hpp"

using namespace hardgrid;
using doctest::Approx;

namespace {

WeightedGraph path(std::size_t n, double w) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return WeightedGraph(n, e, std::vector<double>(n, w));
}

}  // namespace

TEST_CASE("log weights") {
  const auto a = LogWeight::from_linear(2.0), b = LogWeight::from_linear(3.0);
  CHECK((a + b).linear() == Approx(5.0));
  CHECK((a * b).linear() == Approx(6.0));
  CHECK((b / a).linear() == Approx(1.5));
  CHECK(a < b);
  CHECK((LogWeight::zero() + a).log() == a.log());
  CHECK((LogWeight::zero() * a).is_zero());
  CHECK(LogWeight::from_log(1000.0) + LogWeight::from_log(1000.0) == LogWeight::from_log(1000.0 + std::log(2.0)));
}

TEST_CASE("exact solver examples") {
  CHECK(exact_log_z(WeightedGraph(3, {}, {0.5, 0.5, 0.5})).log() == Approx(std::log(3.375)));
  CHECK(exact_log_z(path(2, 1.0)).log() == Approx(std::log(3.0)));
  CHECK(exact_log_z(WeightedGraph(3, {{0, 1}, {1, 2}, {0, 2}}, {1, 1, 1})).log() == Approx(std::log(4.0)));
  CHECK(exact_log_z(path(3, 1.0)).log() == Approx(std::log(5.0)));
  CHECK_THROWS_AS(exact_log_z(WeightedGraph(31, {{0, 2}, {1, 3}}, std::vector<double>(31, 1.0))), CapacityError);
}

TEST_CASE("interval order extends exact solving") {
  const auto p = path(200, 0.7);
  const auto z = interval_log_z(p);
  REQUIRE(z.has_value());
  // Path partition functions satisfy Z_k = Z_{k-1} + w Z_{k-2}.
  double a = 1.0, b = 1.7;
  for (int k = 2; k <= 200; ++k) {
    const double c = b + 0.7 * a;
    a = b;
    b = c;
  }
  CHECK(z->log() == Approx(std::log(b)).epsilon(1e-12));
  CHECK(exact_log_z(p).log() == Approx(z->log()));
  CHECK_FALSE(interval_log_z(WeightedGraph(3, {{0, 2}}, {1, 1, 1})).has_value());
}

TEST_CASE("branching equals subset enumeration") {
  std::mt19937_64 gen(99);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 1 + t % 15;
    auto g = t % 2 ? oracle::random_geometric(gen, 1 + t % 3, n, 0.4, 2.0) : oracle::random_tree(gen, n, 1.0);
    if (t % 3 == 0) {
      std::bernoulli_distribution coin(0.3);
      g.edges.clear();
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
          if (coin(gen)) g.edges.emplace_back(i, j);
    }
    const double ref = oracle::log_z(g);
    const auto wg = g.build();
    CHECK(exact_log_z(wg).log() == Approx(ref).epsilon(1e-10));
    CHECK(naive_log_z(wg).log() == Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("one-dimensional recursion") {
  std::vector<double> x;
  for (int i = 0; i < 10; ++i) x.push_back(0.1 * i);
  const auto m = ModelSpec::hard_sphere(1, 1.0, 0.175, 0.1 * 10 / 1.0);
  const auto g = build_graph(m, CanonicalPointSet(m.region(), 10.0).materialize());
  CHECK(exact_log_z_1d(x, 0.35, 0.1).log() == Approx(exact_log_z(g.to_weighted()).log()).epsilon(1e-12));
  CHECK(exact_log_z_1d(x, 2.0, 0.1).log() == Approx(std::log(1.0 + 10 * 0.1)));
  CHECK(exact_log_z_1d(x, 0.05, 0.1).log() == Approx(10 * std::log1p(0.1)));
  CHECK_THROWS_AS(exact_log_z_1d(std::vector<double>{0.2, 0.1}, 0.1, 0.1), PreconditionError);
  CHECK_THROWS_AS(exact_log_z_1d(x, 0.0, 0.1), PreconditionError);
}

TEST_CASE("one-dimensional recursion matches grid graphs") {
  for (double rho : {5.0, 8.0, 12.0, 20.0, 25.0}) {
    for (double r : {0.05, 0.1, 0.13, 0.25}) {
      const auto m = ModelSpec::hard_sphere(1, 1.0, r, 0.8);
      const auto g = build_graph(m, CanonicalPointSet(m.region(), rho).materialize());
      const auto direct = exact_log_z(g);
      CHECK(direct.log() == Approx(exact_log_z(g.to_weighted()).log()).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginals and distribution") {
  CHECK(exact_marginals(WeightedGraph(1, {}, {1.0}))[0] == Approx(0.5));
  const auto e = exact_marginals(path(2, 1.0));
  CHECK(e[0] == Approx(1.0 / 3));
  CHECK(e[1] == Approx(1.0 / 3));
  const auto star = exact_marginals(WeightedGraph(4, {{0, 1}, {0, 2}, {0, 3}}, {1, 1, 1, 1}));
  CHECK(star[0] == Approx(1.0 / 9));
  CHECK(star[1] == Approx(4.0 / 9));

  std::mt19937_64 gen(4);
  for (int t = 0; t < 30; ++t) {
    const auto g = oracle::random_geometric(gen, 2, 3 + t % 10, 0.5, 1.5);
    const auto ref = oracle::distribution(g);
    const auto dist = exact_distribution(g.build());
    double total = 0.0;
    for (const auto& s : dist) {
      CHECK(s.probability == Approx(ref[s.mask]).epsilon(1e-12));
      total += s.probability;
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
    const auto marg = exact_marginals(g.build());
    const auto ref_marg = oracle::marginals(g);
    for (std::size_t v = 0; v < g.n; ++v) {
      CHECK(marg[v] == Approx(ref_marg[v]).epsilon(1e-12));
      CHECK(marg[v] <= g.w[v] / (1 + g.w[v]) + 1e-15);
    }
  }
}

TEST_CASE("multiset partition function") {
  CHECK(multiset_log_z(WeightedGraph(1, {}, {0.5})).log() == Approx(std::log(2.0)));
  CHECK(multiset_log_z(path(2, 1.0 / 3)).log() == Approx(std::log(2.0)));
  CHECK(multiset_log_z(WeightedGraph(2, {}, {0.0, 0.0})).log() == Approx(0.0));
  CHECK_THROWS_AS(multiset_log_z(WeightedGraph(1, {}, {1.0})), PreconditionError);
}

TEST_CASE("weight inequalities on random graphs") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    auto g = oracle::random_geometric(gen, 2, 2 + t % 12, 0.45, 0.5);
    const double ln_z = oracle::log_z(g);
    double sum_w = 0.0;
    for (double w : g.w) sum_w += w;
    CHECK(ln_z <= sum_w + 1e-12);
    auto g2 = g;
    for (auto& w : g2.w) w = u(gen);
    auto g12 = g;
    for (std::size_t v = 0; v < g.n; ++v) g12.w[v] += g2.w[v];
    CHECK(oracle::log_z(g12) <= ln_z + oracle::log_z(g2) + 1e-12);
  }
}

TEST_CASE("tree threshold") {
  CHECK(std::isinf(tree_threshold(2)));
  CHECK(tree_threshold(3) == Approx(4.0));
  CHECK(tree_threshold(4) == Approx(27.0 / 16.0));
  CHECK(tree_threshold(1000) * 1000 / std::exp(1.0) == Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(tree_threshold(1), PreconditionError);
}

TEST_CASE("interval sampler reproduces the exact distribution") {
  const std::vector<double> x{0.0, 0.1, 0.25, 0.3, 0.5, 0.55, 0.8};
  const double sigma = 0.22, w = 0.9;
  IntervalSampler sampler(x, sigma, w);
  CHECK(sampler.log_z().log() == Approx(exact_log_z_1d(x, sigma, w).log()).epsilon(1e-13));
  oracle::Graph g;
  g.n = x.size();
  g.w.assign(g.n, w);
  for (std::uint32_t i = 0; i < g.n; ++i)
    for (std::uint32_t j = i + 1; j < g.n; ++j)
      if (std::abs(x[i] - x[j]) < sigma) g.edges.emplace_back(i, j);
  const auto probs = oracle::distribution(g);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  Rng rng(12, 0);
  for (int s = 0; s < 100000; ++s) {
    std::uint64_t mask = 0;
    for (auto v : sampler.sample(rng)) mask |= std::uint64_t{1} << v;
    ++counts[mask];
  }
  CHECK(oracle::chi_square_pvalue(counts, probs) > 1e-3);
}
