#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hardgrid/discretize.hpp"
#include "hardgrid/glauber.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/log_weight.hpp"
#include "hardgrid/model.hpp"

namespace hardgrid {

/// Particle positions (row-major, N x d) with a type per particle.
struct ContinuousConfiguration {
  int dimension = 1;
  std::vector<double> coords;
  std::vector<std::uint32_t> types;

  std::size_t size() const noexcept { return types.size(); }
  std::span<const double> position(std::size_t i) const noexcept {
    return {coords.data() + i * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
  }
};

/// True iff every pair satisfies dist(x_i, x_j) >= Lambda(type_i, type_j).
bool is_valid(const ModelSpec& model, const ContinuousConfiguration& config);

/// ln of the one-dimensional hard-rod partition function sum_k lambda^k / k! max(l - (k - 1) 2r, 0)^k.
LogWeight tonks_log_z(double side_length, double radius, double fugacity);

struct OracleEstimate {
  double ln_z = 0.0;
  double std_error = 0.0;           ///< Monte Carlo standard error of ln_z
  std::size_t truncation = 0;       ///< highest particle count K kept in the series
  std::size_t samples_per_term = 0;
  double tail_log_bound = 0.0;      ///< ln Z - ln_z lies in [0, tail_log_bound] up to sampling error
};

/// Largest truncation the series oracle accepts.
inline constexpr std::size_t kOracleMaxTruncation = 20;

/*!
 * Series Monte Carlo for ln Z: each term with k particles and type counts c
 * contributes prod_i (lambda_i vol)^{c_i} / c_i! times the fraction of
 * uniform placements that respect every distance constraint. The series is
 * cut at the smallest K whose Poisson tail is at most tol / 2.
 */
OracleEstimate oracle_log_z_mc(const ModelSpec& model, double tol, std::uint64_t seed,
                               std::optional<std::size_t> samples_per_term = std::nullopt);

/*!
 * Places the vertices (point * q + type) in uniformly random order, each at a
 * uniform position in the preimage cell of its point.
 */
ContinuousConfiguration perturb(const Allocation& allocation, std::size_t q, std::span<const std::uint32_t> vertices,
                                std::uint64_t seed);
ContinuousConfiguration perturb(const HardCoreGraph& graph, const Allocation& allocation,
                                std::span<const std::uint32_t> vertices, std::uint64_t seed);

/// Smallest feasible resolution above sqrt(d) (32 q max(lmax, lmax^2) vol / eps_s)^(1/d) max(1, 4 / Lambda_min).
double sampling_resolution(const ModelSpec& model, double eps_s);

enum class SamplerBackend {
  automatic,       ///< interval_exact when d = 1 and q = 1 with a positive distance, glauber otherwise
  glauber,         ///< Glauber dynamics at total-variation budget eps_s / 2 on the materialized graph
  interval_exact,  ///< exact one-dimensional sampler on the canonical grid
};

struct ContinuousOptions {
  std::size_t max_retries = 16;
  SamplerBackend backend = SamplerBackend::automatic;
  double constant = 1.0;                    ///< Glauber schedule constant
  std::optional<std::uint64_t> steps;       ///< Glauber step override
  std::uint64_t max_pairs = kDefaultMaxPairs;
};

struct ContinuousSample {
  ContinuousConfiguration config;
  bool valid = false;
  std::size_t retries = 0;           ///< attempts discarded before the returned one
  std::size_t invalid_attempts = 0;  ///< attempts whose configuration violated a constraint
  std::uint64_t seed = 0;
};

/// Approximate sampler for the continuous Gibbs distribution: discrete sample, perturbation, rejection.
class ContinuousSampler {
 public:
  ContinuousSampler(const ModelSpec& model, double eps_s, const ContinuousOptions& options = {});

  ContinuousSample sample(std::uint64_t seed) const;

  double resolution() const noexcept { return resolution_; }
  SamplerBackend backend() const noexcept { return backend_; }
  std::size_t num_vertices() const noexcept { return num_vertices_; }
  const RegimeCheck& regime() const noexcept { return regime_; }
  std::uint64_t steps() const noexcept { return steps_; }

 private:
  std::vector<std::uint32_t> discrete_sample(std::uint64_t seed, std::uint64_t attempt) const;

  ModelSpec model_;
  double eps_s_;
  ContinuousOptions options_;
  double resolution_;
  SamplerBackend backend_;
  std::size_t num_vertices_ = 0;
  RegimeCheck regime_;
  std::uint64_t steps_ = 0;
  Allocation allocation_;
  std::optional<IntervalSampler> interval_;
  std::optional<WeightedGraph> graph_;
};

ContinuousSample sample_continuous(const ModelSpec& model, double eps_s, std::uint64_t seed,
                                   const ContinuousOptions& options = {});

}  // namespace hardgrid
