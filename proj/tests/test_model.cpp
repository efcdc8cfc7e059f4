#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hardgrid/errors.hpp"
#include "hardgrid/model.hpp"

using namespace hardgrid;
using doctest::Approx;

TEST_CASE("ball volume") {
  CHECK(ball_volume(1, 0.5) == Approx(1.0));
  CHECK(ball_volume(2, 1.0) == Approx(std::numbers::pi));
  CHECK(ball_volume(3, 1.0) == Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(ball_volume(2, 0.0) == 0.0);
}

TEST_CASE("presets and region") {
  const auto hs = ModelSpec::hard_sphere(2, 3.0, 0.25, 1.5);
  CHECK(hs.q() == 1);
  CHECK(hs.interaction()(0, 0) == 0.5);
  CHECK(hs.volume() == Approx(9.0));
  const auto wr = ModelSpec::widom_rowlinson(1, 1.0, {0.1, 0.2, 0.3}, {1, 1, 1});
  CHECK(wr.interaction()(0, 0) == 0.0);
  CHECK(wr.interaction()(0, 2) == Approx(0.4));
  CHECK(wr.interaction()(2, 1) == Approx(0.5));
  CHECK(wr.interaction().lambda_min() == Approx(0.3));
  CHECK(wr.interaction().lambda_max() == Approx(0.5));
  CHECK_THROWS_AS(Region(0, 1.0), Error);
  CHECK_THROWS_AS(Region(1, -1.0), Error);
  CHECK_THROWS_AS(Fugacities({-1.0}), Error);
  CHECK_THROWS_AS(InteractionMatrix(SquareMatrix(2, {0, 1, 2, 0})), Error);
}

TEST_CASE("volume exclusion matrix") {
  const auto t1 = volume_exclusion_matrix(ModelSpec::hard_sphere(1, 1.0, 0.25, 1.0));
  CHECK(t1(0, 0) == Approx(1.0));
  const auto t2 = volume_exclusion_matrix(ModelSpec::widom_rowlinson(2, 1.0, {1.0, 1.0}, {1.0, 1.0}));
  CHECK(t2(0, 0) == 0.0);
  CHECK(t2(0, 1) == Approx(4.0 * std::numbers::pi));
  CHECK(t2(1, 0) == Approx(4.0 * std::numbers::pi));
  const ModelSpec free(Region(2, 1.0), InteractionMatrix(SquareMatrix(2, {0, 0, 0, 0})), Fugacities({1, 1}));
  CHECK(volume_exclusion_matrix(free).l1_norm() == 0.0);
  CHECK(std::isinf(free.interaction().lambda_min()));
}

TEST_CASE("volume exclusion symmetry and monotonicity") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 3;
    std::vector<double> a(9), b(9);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        a[i * 3 + j] = a[j * 3 + i] = u(gen);
        b[i * 3 + j] = b[j * 3 + i] = a[i * 3 + j] + u(gen);
      }
    const ModelSpec ma(Region(d, 1.0), InteractionMatrix(SquareMatrix(3, a)), Fugacities({1, 1, 1}));
    const ModelSpec mb(Region(d, 1.0), InteractionMatrix(SquareMatrix(3, b)), Fugacities({1, 1, 1}));
    const auto ta = volume_exclusion_matrix(ma), tb = volume_exclusion_matrix(mb);
    CHECK(ta.is_symmetric());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(ta(i, j) <= tb(i, j));
  }
}

TEST_CASE("upper bound of ln Z") {
  CHECK(log_z_upper_bound(ModelSpec::hard_sphere(1, 2.0, 0.1, 1.0)) == Approx(2.0));
  CHECK(log_z_upper_bound(ModelSpec::widom_rowlinson(2, 1.0, {0.1, 0.1}, {1.0, 0.5})) == Approx(1.5));
  CHECK(log_z_upper_bound(ModelSpec::hard_sphere(1, 2.0, 0.1, 0.0)) == 0.0);
}

TEST_CASE("uniform condition") {
  auto r = check_uniform_condition(ModelSpec::hard_sphere(1, 1.0, 0.25, 2.0));
  CHECK(r.satisfied);
  CHECK(r.rhs == Approx(std::exp(1.0)));
  CHECK_FALSE(check_uniform_condition(ModelSpec::hard_sphere(1, 1.0, 0.25, 3.0)).satisfied);
  CHECK(check_uniform_condition(ModelSpec::widom_rowlinson(1, 1.0, {0.25, 0.25}, {2.0, 2.0})).satisfied);
  CHECK(r.describe().find("holds") != std::string::npos);
  for (int d = 1; d <= 3; ++d) {
    const double radius = 0.2;
    const auto rep = check_uniform_condition(ModelSpec::hard_sphere(d, 1.0, radius, 1.0));
    CHECK(rep.rhs == Approx(std::exp(1.0) / (std::pow(2.0, d) * ball_volume(d, radius))).epsilon(1e-14));
  }
  const ModelSpec free(Region(1, 1.0), InteractionMatrix(SquareMatrix(1, {0.0})), Fugacities({1.0}));
  CHECK_THROWS_AS(check_uniform_condition(free), Error);
}

TEST_CASE("clique condition") {
  const auto feasible = ModelSpec::widom_rowlinson(1, 1.0, {0.25, 0.25}, {4.0, 0.1});
  auto rep = check_clique_condition(feasible);
  REQUIRE(rep.feasible());
  CHECK(verify_clique_witness(feasible, rep.witness));
  CHECK_FALSE(check_clique_condition(ModelSpec::widom_rowlinson(1, 1.0, {0.25, 0.25}, {2.0, 2.0})).feasible());
  const ModelSpec free(Region(2, 1.0), InteractionMatrix(SquareMatrix(2, {0, 0, 0, 0})), Fugacities({5, 5}));
  rep = check_clique_condition(free);
  REQUIRE(rep.feasible());
  CHECK(rep.witness == std::vector<double>{1.0, 1.0});
}

TEST_CASE("clique witnesses satisfy the strict inequality") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int certified = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t q = 1 + t % 4;
    std::vector<double> lam(q * q), fug(q);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = i; j < q; ++j) lam[i * q + j] = lam[j * q + i] = 0.3 * u(gen);
    for (auto& f : fug) f = 4.0 * u(gen);
    const ModelSpec m(Region(1 + t % 2, 1.0), InteractionMatrix(SquareMatrix(q, lam)), Fugacities(fug));
    const auto rep = check_clique_condition(m);
    if (rep.feasible()) {
      ++certified;
      CHECK(verify_clique_witness(m, rep.witness));
      CHECK(rep.spectral_radius < 1.0);
    } else {
      CHECK(rep.spectral_radius >= 1.0 - 1e-6);
    }
  }
  CHECK(certified > 30);
}
