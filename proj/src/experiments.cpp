#include "hardgrid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hardgrid/continuous.hpp"
#include "hardgrid/errors.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/parallel.hpp"
#include "hardgrid/rng.hpp"
#include "numeric_util.hpp"

namespace hardgrid {

std::uint64_t hypercube_partitioning_size(int dimension, double side_length, double eps) {
  detail::require(eps > 0.0, "hypercube_partitioning_size: eps must be positive");
  const double k = detail::tolerant_ceil(std::sqrt(static_cast<double>(dimension)) * side_length / eps);
  return static_cast<std::uint64_t>(std::pow(k, dimension));
}

std::uint64_t required_points(std::uint64_t m, double gamma1, double delta2, double p) {
  detail::require(gamma1 > 0.0 && gamma1 <= 1.0, "required_points: gamma1 must lie in (0, 1]");
  detail::require(delta2 > 0.0 && delta2 <= 1.0, "required_points: delta2 must lie in (0, 1]");
  detail::require(p > 0.0 && p <= 1.0, "required_points: p must lie in (0, 1]");
  const auto md = static_cast<double>(m);
  return static_cast<std::uint64_t>(
      detail::tolerant_ceil(48.0 / (delta2 * delta2) / gamma1 * md * std::log(2.0 * md / p)));
}

namespace {

void require_hard_rods(const ModelSpec& model, const char* what) {
  if (model.dimension() != 1 || model.q() != 1)
    throw PreconditionError(std::string(what) + ": requires a one-dimensional single-type model");
}

double hard_rod_reference(const ModelSpec& model) {
  return tonks_log_z(model.region().side_length(), model.interaction()(0, 0) / 2.0, model.fugacities()[0]).log();
}

// ln Z of the hard-core representation on n uniform random points.
double random_discretization_log_z(const ModelSpec& model, std::size_t n, std::uint64_t seed, std::uint64_t trial) {
  const double side = model.region().side_length();
  Rng rng(seed, stream_key(n, trial));
  std::vector<double> x(n);
  const double below_side = std::nextafter(side, 0.0);
  for (double& v : x) v = std::min(rng.uniform() * side, below_side);
  std::sort(x.begin(), x.end());
  const double weight = model.fugacities()[0] * side / static_cast<double>(n);
  const double sigma = model.interaction()(0, 0);
  if (sigma == 0.0) return static_cast<double>(n) * std::log1p(weight);
  // Coincident draws (probability ~ n^2 2^-53) would break strict ordering; nudge them apart.
  for (std::size_t k = 1; k < n; ++k)
    if (!(x[k - 1] < x[k])) x[k] = std::nextafter(x[k - 1], side);
  return exact_log_z_1d(x, sigma, weight).log();
}

std::vector<TrialRow> run_trials(const ModelSpec& model, std::size_t n, std::size_t trials, std::uint64_t seed,
                                 double reference) {
  std::vector<TrialRow> rows(trials);
  parallel_for(trials, [&](std::size_t t) {
    const double ln_z = random_discretization_log_z(model, n, seed, t);
    rows[t] = {t, n, ln_z, reference, ln_z - reference};
  });
  return rows;
}

}  // namespace

ConcentrationReport concentration_trial(const ModelSpec& model, std::size_t n, std::size_t trials, double eps_d,
                                        std::uint64_t seed) {
  require_hard_rods(model, "concentration_trial");
  detail::require(n >= 1 && n <= 1'000'000, "concentration_trial: n must lie in [1, 1e6]");
  ConcentrationReport out;
  out.n = n;
  out.trials = trials;
  out.eps_d = eps_d;
  out.reference_ln_z = hard_rod_reference(model);
  if (trials == 0) return out;
  out.rows = run_trials(model, n, trials, seed, out.reference_ln_z);
  std::vector<double> dev;
  std::size_t within = 0;
  for (const auto& r : out.rows) {
    dev.push_back(r.deviation);
    within += std::abs(r.deviation) <= eps_d;
  }
  std::sort(dev.begin(), dev.end());
  out.fraction_within = static_cast<double>(within) / static_cast<double>(trials);
  out.min_deviation = dev.front();
  out.max_deviation = dev.back();
  out.median_deviation = dev.size() % 2 == 1 ? dev[dev.size() / 2] : 0.5 * (dev[dev.size() / 2 - 1] + dev[dev.size() / 2]);
  return out;
}

ExpectationReport expectation_check(const ModelSpec& model, std::size_t n, std::size_t trials, std::uint64_t seed) {
  require_hard_rods(model, "expectation_check");
  detail::require(n >= 1, "expectation_check: n must be positive");
  detail::require(trials >= 2, "expectation_check: at least two trials are required");
  ExpectationReport out;
  out.n = n;
  out.trials = trials;
  out.ln_z_ref = hard_rod_reference(model);
  out.rows = run_trials(model, n, trials, seed, out.ln_z_ref);
  // Work with Z_hc / Z_ref to stay in range.
  double mean = 0.0;
  for (const auto& r : out.rows) mean += std::exp(r.deviation);
  mean /= static_cast<double>(trials);
  double ss = 0.0;
  for (const auto& r : out.rows) ss += (std::exp(r.deviation) - mean) * (std::exp(r.deviation) - mean);
  out.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  out.mean_ln_z = out.ln_z_ref + std::log(mean);
  const double lo = mean - 2.0 * out.std_error;
  out.ci_low = lo > 0.0 ? out.ln_z_ref + std::log(lo) : -std::numeric_limits<double>::infinity();
  out.ci_high = out.ln_z_ref + std::log(mean + 2.0 * out.std_error);
  out.pass = lo <= 1.0;
  return out;
}

double tightness_threshold(double lambda, double vol, double eps_d) {
  detail::require(eps_d > 0.0, "tightness_threshold: eps_d must be positive");
  return lambda * lambda * vol * vol / (6.0 * eps_d);
}

bool tightness_check(double lambda, double vol, double n, double eps_d) {
  detail::require(lambda * vol > 6.0, "tightness_check: requires lambda vol > 6");
  detail::require(n > 0.0, "tightness_check: n must be positive");
  const double x = lambda * vol;
  return n * std::log1p(x / n) < x - eps_d;
}

bool quadratic_gap_holds(double x, double y) {
  detail::require(x > 0.0 && y >= x, "quadratic_gap_holds: requires y >= x > 0");
  return y * std::log1p(x / y) <= x - x * x / (6.0 * y);
}

double modified_markov_bound(double eps, double delta, double c) {
  detail::require(eps > 0.0, "modified_markov_bound: eps must be positive");
  detail::require(delta >= 0.0 && delta <= 1.0, "modified_markov_bound: delta must lie in [0, 1]");
  detail::require(c >= 0.0, "modified_markov_bound: c must be non-negative");
  return (1.0 + delta * (1.0 - eps) / eps) / (c + 1.0);
}

double lower_bound_accuracy(const ModelSpec& model, double n, double delta, double eps) {
  if (eps > 0.5) return std::numeric_limits<double>::infinity();
  const auto q = static_cast<double>(model.q());
  const double lmax = model.fugacities().lambda_max();
  const double vol = model.volume();
  const double ball = ball_volume(model.dimension(), model.interaction().lambda_max() + 1.0);
  const double from_eps = eps * 2.0 * q * lmax * lmax * ball * vol;
  const double from_delta = delta * 16.0 * q * lmax * vol;
  const double from_n = 64.0 * q * lmax * lmax * vol * vol / n;
  return std::max({from_eps, from_delta, from_n});
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size(), "spearman: inputs must have equal length");
  if (x.size() < 2) return 0.0;
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace hardgrid
