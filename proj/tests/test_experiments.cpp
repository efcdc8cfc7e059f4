#include <cmath>
#include <random>

#include "doctest.h"
#include "hardgrid/continuous.hpp"
#include "hardgrid/discretize.hpp"
#include "hardgrid/errors.hpp"
#include "hardgrid/experiments.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/parallel.hpp"

using namespace hardgrid;
using doctest::Approx;

TEST_CASE("partitioning sizes") {
  CHECK(hypercube_partitioning_size(2, 1.0, 0.5) == 9);
  CHECK(hypercube_partitioning_size(1, 1.0, 1.0) == 1);
  CHECK(hypercube_partitioning_size(1, 10.0, 0.1) == 100);
  const auto p = hypercube_partitioning(2, 1.0, 0.5);
  CHECK(p.size() == 9);
  CHECK(p.epsilon() <= 0.5);
}

TEST_CASE("required points") {
  CHECK(required_points(16, 1.0, 0.5, 0.5) == 12777);
  CHECK(required_points(1, 1.0, 1.0, 2.0 / std::exp(2.0)) == 96);
  for (std::uint64_t m = 1; m < 1000; m *= 2) CHECK(required_points(2 * m, 1.0, 0.5, 0.5) > 2 * required_points(m, 1.0, 0.5, 0.5));
}

TEST_CASE("concentration trials") {
  const auto m = ModelSpec::hard_sphere(1, 10.0, 0.25, 1.0);
  const auto empty = concentration_trial(m, 100, 0, 0.2, 1);
  CHECK(empty.rows.empty());
  CHECK(empty.fraction_within == 0.0);
  const auto tiny = concentration_trial(m, 2, 50, 0.2, 1);
  CHECK(tiny.fraction_within == 0.0);
  const auto big = concentration_trial(m, 20000, 20, 0.2, 1);
  CHECK(big.reference_ln_z == Approx(tonks_log_z(10.0, 0.25, 1.0).log()));
  CHECK(big.rows.size() == 20);
  CHECK(big.min_deviation <= big.median_deviation);
  CHECK(big.median_deviation <= big.max_deviation);
  for (const auto& r : big.rows) CHECK(r.deviation == Approx(r.ln_z_hc - r.ln_z_ref));
  set_thread_count(1);
  const auto a = concentration_trial(m, 3000, 10, 0.2, 5);
  set_thread_count(3);
  const auto b = concentration_trial(m, 3000, 10, 0.2, 5);
  set_thread_count(0);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].ln_z_hc == b.rows[i].ln_z_hc);
  CHECK_THROWS_AS(concentration_trial(ModelSpec::hard_sphere(2, 1.0, 0.1, 1.0), 10, 1, 0.2, 1), PreconditionError);
}

TEST_CASE("expectation check") {
  const ModelSpec free(Region(1, 5.0), InteractionMatrix(SquareMatrix(1, {0.0})), Fugacities({1.0}));
  const auto r = expectation_check(free, 50, 10, 1);
  CHECK(r.mean_ln_z == Approx(50 * std::log1p(5.0 / 50)).epsilon(1e-12));
  CHECK(r.mean_ln_z < 5.0);
  CHECK(r.pass);
  const auto zero = expectation_check(ModelSpec::hard_sphere(1, 5.0, 0.25, 0.0), 50, 10, 1);
  CHECK(zero.mean_ln_z == 0.0);
  CHECK(zero.ln_z_ref == 0.0);
  CHECK(zero.pass);
}

TEST_CASE("tightness") {
  CHECK(tightness_threshold(1.0, 12.0, 1.0) == Approx(24.0));
  CHECK(tightness_check(1.0, 12.0, 20.0, 1.0));
  CHECK_FALSE(tightness_check(1.0, 12.0, 1e6, 1.0));
  CHECK(20 * std::log(1.6) == Approx(9.40).epsilon(1e-3));
  CHECK(quadratic_gap_holds(12.0, 24.0));
  CHECK_THROWS_AS(tightness_check(1.0, 5.0, 3.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(quadratic_gap_holds(2.0, 1.0), PreconditionError);
}

TEST_CASE("modified Markov bound") {
  CHECK(modified_markov_bound(0.1, 0.01, 1.0) == Approx(0.545));
  CHECK(modified_markov_bound(0.3, 0.0, 4.0) == Approx(0.2));
  CHECK(modified_markov_bound(0.1, 0.2, 0.0) == Approx(1.0 + 0.2 * 0.9 / 0.1));

  // X >= 0 with E[X] = 1 and Pr[X < 1 - eps] <= delta; compare the upper tail with the bound.
  const double eps = 0.2, delta = 0.05;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(10000);
  for (auto& v : x) v = u(gen) < delta ? 0.5 * u(gen) : 1.0 - eps + 2.0 * eps * u(gen);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double c : {0.5, 1.0, 2.0}) {
    int tail = 0;
    for (double v : x) tail += v >= (1 + c * eps) * mean;
    const double freq = tail / double(x.size()), bound = modified_markov_bound(eps, delta, c);
    CHECK(freq <= bound + 3 * std::sqrt(bound * (1 - std::min(bound, 1.0)) / x.size()));
  }
}

TEST_CASE("lower bound accuracy map") {
  const auto m = ModelSpec::hard_sphere(1, 2.0, 0.1, 1.0);
  CHECK(std::isinf(lower_bound_accuracy(m, 100, 0.0, 0.6)));
  const double vol = 2.0, q = 1.0, bv = ball_volume(1, 0.2 + 1.0);
  CHECK(lower_bound_accuracy(m, 1e9, 0.0, 0.01) == Approx(0.01 * 2 * q * bv * vol));
  CHECK(lower_bound_accuracy(m, 1e9, 0.3, 0.0) == Approx(0.3 * 16 * q * vol));
  CHECK(lower_bound_accuracy(m, 100, 0.0, 0.0) == Approx(64 * q * vol * vol / 100));
}

TEST_CASE("random discretizations respect the deterministic lower bound") {
  // Small lambda keeps the implied eps_d below one at desk-scale n.
  const auto m = ModelSpec::hard_sphere(1, 2.0, 0.05, 0.1);
  const double ref = tonks_log_z(2.0, 0.05, 0.1).log();
  const auto part = hypercube_partitioning(1, 2.0, 0.05);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto points = random_point_set(m.region(), 100000, seed);
    const auto alloc = partition_allocation_from_random(points, part);
    if (!std::holds_alternative<Allocation>(alloc)) continue;
    const auto& a = std::get<Allocation>(alloc);
    const double eps_d = lower_bound_accuracy(m, 1e5, a.delta(), a.epsilon());
    if (!(eps_d < 1.0)) continue;
    ++checked;
    std::sort(points.coords.begin(), points.coords.end());
    const double ln_hc = exact_log_z_1d(points.coords, 0.1, 0.1 * 2.0 / 1e5).log();
    CHECK(ln_hc >= std::log1p(-eps_d) + ref);
  }
  CHECK(checked >= 15);
}

TEST_CASE("rank correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, std::vector<double>{2, 4, 6, 8, 10}) == Approx(1.0));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == Approx(-1.0));
  CHECK(spearman(x, std::vector<double>{1, 1, 1, 1, 1}) == 0.0);
  CHECK(spearman(x, std::vector<double>{1, 1, 2, 2, 3}) > 0.9);
}
