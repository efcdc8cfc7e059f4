#include "hardgrid/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "hardgrid/errors.hpp"
#include "hardgrid/parallel.hpp"

namespace hardgrid {

bool is_valid(const ModelSpec& model, const ContinuousConfiguration& config) {
  const std::size_t n = config.size();
  const auto d = static_cast<std::size_t>(config.dimension);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double t = model.interaction()(config.types[a], config.types[b]);
      if (t == 0.0) continue;
      double d2 = 0.0;
      for (std::size_t ax = 0; ax < d; ++ax) {
        const double diff = config.coords[a * d + ax] - config.coords[b * d + ax];
        d2 += diff * diff;
      }
      if (d2 < t * t) return false;
    }
  return true;
}

LogWeight tonks_log_z(double side_length, double radius, double fugacity) {
  detail::require(side_length > 0.0, "tonks_log_z: side length must be positive");
  detail::require(radius >= 0.0, "tonks_log_z: radius must be non-negative");
  detail::require(fugacity >= 0.0, "tonks_log_z: fugacity must be non-negative");
  if (fugacity == 0.0) return LogWeight::one();
  const double sigma = 2.0 * radius;
  if (sigma == 0.0) return LogWeight::from_log(fugacity * side_length);
  std::vector<double> terms{0.0};
  const double log_lambda = std::log(fugacity);
  for (std::size_t k = 1;; ++k) {
    const double free_length = side_length - static_cast<double>(k - 1) * sigma;
    if (free_length <= 0.0) break;
    const auto kd = static_cast<double>(k);
    terms.push_back(kd * log_lambda - std::lgamma(kd + 1.0) + kd * std::log(free_length));
  }
  return LogWeight::from_log(log_sum_exp(terms));
}

namespace {

struct SeriesTerm {
  std::size_t k = 0;
  std::vector<std::uint32_t> types;  // type of each of the k particles
  double log_coefficient = 0.0;
};

void enumerate_counts(std::size_t q, std::size_t k, std::size_t type, std::vector<std::size_t>& counts,
                      std::vector<std::vector<std::size_t>>& out) {
  if (type + 1 == q) {
    counts[type] = k;
    out.push_back(counts);
    return;
  }
  for (std::size_t c = 0; c <= k; ++c) {
    counts[type] = c;
    enumerate_counts(q, k - c, type + 1, counts, out);
  }
}

}  // namespace

OracleEstimate oracle_log_z_mc(const ModelSpec& model, double tol, std::uint64_t seed,
                               std::optional<std::size_t> samples_per_term) {
  detail::require(tol > 0.0, "oracle_log_z_mc: tolerance must be positive");
  OracleEstimate out;
  const double vol = model.volume();
  const double mass = model.fugacities().sum() * vol;
  if (mass == 0.0) return out;

  // Smallest K with Pr[Poisson(mass) > K] <= tol / 2.
  std::size_t K = 0;
  double tail = boost::math::gamma_p(1.0, mass);
  while (tail > tol / 2.0) {
    ++K;
    if (K > kOracleMaxTruncation)
      throw PreconditionError("oracle_log_z_mc: the series needs more than " + std::to_string(kOracleMaxTruncation) +
                              " terms (sum lambda vol = " + std::to_string(mass) +
                              "); use the closed form for hard rods instead");
    tail = boost::math::gamma_p(static_cast<double>(K + 1), mass);
  }
  out.truncation = K;
  const auto required = static_cast<std::size_t>(std::ceil((4.0 / tol) * (4.0 / tol)));
  out.samples_per_term = std::min<std::size_t>(samples_per_term.value_or(required), 10'000'000);

  const std::size_t q = model.q();
  const int d = model.dimension();
  std::vector<SeriesTerm> terms;
  for (std::size_t k = 0; k <= K; ++k) {
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> scratch(q, 0);
    enumerate_counts(q, k, 0, scratch, counts);
    for (const auto& c : counts) {
      SeriesTerm t;
      t.k = k;
      bool zero = false;
      for (std::size_t i = 0; i < q; ++i) {
        if (c[i] == 0) continue;
        const double lv = model.fugacities()[i] * vol;
        if (lv == 0.0) zero = true;
        else t.log_coefficient += static_cast<double>(c[i]) * std::log(lv) - std::lgamma(static_cast<double>(c[i]) + 1.0);
        t.types.insert(t.types.end(), c[i], static_cast<std::uint32_t>(i));
      }
      if (!zero) terms.push_back(std::move(t));
    }
  }

  const bool unconstrained = model.interaction().lambda_max() == 0.0;
  const std::size_t samples = out.samples_per_term;
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> fraction(terms.size(), 1.0);
  std::vector<std::size_t> needs_sampling;
  for (std::size_t t = 0; t < terms.size(); ++t)
    if (terms[t].k >= 2 && !unconstrained) needs_sampling.push_back(t);

  std::vector<std::size_t> hits(needs_sampling.size() * chunks, 0);
  const double side = model.region().side_length();
  parallel_for(hits.size(), [&](std::size_t task) {
    const std::size_t t = needs_sampling[task / chunks], chunk = task % chunks;
    const SeriesTerm& term = terms[t];
    Rng rng(seed, stream_key(t, chunk));
    const std::size_t begin = chunk * kChunk, end = std::min(samples, begin + kChunk);
    std::vector<double> pos(term.k * static_cast<std::size_t>(d));
    std::size_t ok = 0;
    for (std::size_t s = begin; s < end; ++s) {
      bool valid = true;
      for (std::size_t a = 0; a < term.k && valid; ++a) {
        for (int ax = 0; ax < d; ++ax) pos[a * static_cast<std::size_t>(d) + static_cast<std::size_t>(ax)] = rng.uniform() * side;
        for (std::size_t b = 0; b < a; ++b) {
          const double thr = model.interaction()(term.types[a], term.types[b]);
          double d2 = 0.0;
          for (int ax = 0; ax < d; ++ax) {
            const double diff = pos[a * static_cast<std::size_t>(d) + static_cast<std::size_t>(ax)] -
                                pos[b * static_cast<std::size_t>(d) + static_cast<std::size_t>(ax)];
            d2 += diff * diff;
          }
          if (d2 < thr * thr) {
            valid = false;
            break;
          }
        }
      }
      ok += valid;
    }
    hits[task] = ok;
  });
  for (std::size_t s = 0; s < needs_sampling.size(); ++s) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < chunks; ++c) total += hits[s * chunks + c];
    fraction[needs_sampling[s]] = static_cast<double>(total) / static_cast<double>(samples);
  }

  std::vector<double> log_terms;
  double log_max = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) log_max = std::max(log_max, t.log_coefficient);
  double z_scaled = 0.0, var_scaled = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = std::exp(terms[t].log_coefficient - log_max);
    const double p = fraction[t];
    z_scaled += c * p;
    if (terms[t].k >= 2 && !unconstrained) var_scaled += c * c * p * (1.0 - p) / static_cast<double>(samples);
  }
  out.ln_z = log_max + std::log(z_scaled);
  out.std_error = std::sqrt(var_scaled) / z_scaled;
  // Dropped terms sum to at most e^mass Pr[Poisson(mass) > K].
  out.tail_log_bound = std::log1p(std::exp(mass + std::log(tail) - out.ln_z));
  return out;
}

ContinuousConfiguration perturb(const Allocation& allocation, std::size_t q, std::span<const std::uint32_t> vertices,
                                std::uint64_t seed) {
  detail::require(q >= 1, "perturb: at least one type is required");
  Rng rng(seed);
  std::vector<std::uint32_t> order(vertices.begin(), vertices.end());
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  ContinuousConfiguration out;
  out.dimension = allocation.dimension();
  out.coords.reserve(order.size() * static_cast<std::size_t>(out.dimension));
  for (std::uint32_t v : order) {
    const std::size_t point = v / q;
    if (point >= allocation.num_points()) throw PreconditionError("perturb: vertex outside the allocation");
    const auto pos = allocation.sample_cell(point, rng);
    out.coords.insert(out.coords.end(), pos.begin(), pos.end());
    out.types.push_back(static_cast<std::uint32_t>(v % q));
  }
  return out;
}

ContinuousConfiguration perturb(const HardCoreGraph& graph, const Allocation& allocation,
                                std::span<const std::uint32_t> vertices, std::uint64_t seed) {
  if (graph.num_points() != allocation.num_points())
    throw PreconditionError("perturb: the allocation does not cover the graph's point set");
  return perturb(allocation, graph.q(), vertices, seed);
}

double sampling_resolution(const ModelSpec& model, double eps_s) {
  detail::require(eps_s > 0.0 && eps_s <= 1.0, "sampling_resolution: eps_s must lie in (0, 1]");
  const double side = model.region().side_length();
  return smallest_feasible_resolution(side, std::max(closed_form_resolution(model, eps_s, 32.0), 1.0 / side));
}

namespace {

SamplerBackend choose_backend(const ModelSpec& model, SamplerBackend requested) {
  const bool interval_ok = model.dimension() == 1 && model.q() == 1 && model.interaction()(0, 0) > 0.0;
  if (requested == SamplerBackend::interval_exact && !interval_ok)
    throw PreconditionError("interval sampler needs a one-dimensional single-type model with positive distance");
  if (requested == SamplerBackend::automatic) return interval_ok ? SamplerBackend::interval_exact : SamplerBackend::glauber;
  return requested;
}

}  // namespace

ContinuousSampler::ContinuousSampler(const ModelSpec& model, double eps_s, const ContinuousOptions& options)
    : model_(model),
      eps_s_(eps_s),
      options_(options),
      resolution_(sampling_resolution(model, eps_s)),
      backend_(choose_backend(model, options.backend)),
      allocation_(Allocation::canonical_floor(model.region(), resolution_)) {
  const CanonicalPointSet grid(model.region(), resolution_);
  num_vertices_ = static_cast<std::size_t>(grid.size()) * model.q();
  if (backend_ == SamplerBackend::interval_exact) {
    PointSet points = grid.materialize();
    const double weight = model.fugacities()[0] * model.volume() / static_cast<double>(points.size());
    interval_.emplace(std::move(points.coords), model.interaction()(0, 0) * resolution_, weight);
    regime_ = {true, "exact one-dimensional sampler; no mixing condition needed"};
    return;
  }
  const HardCoreGraph hc = build_graph(model, grid.materialize(), options.max_pairs);
  graph_.emplace(hc.to_weighted());
  const bool certified = check_clique_condition(model).feasible();
  regime_ = check_regime(*graph_, certified);
  steps_ = options.steps ? *options.steps : schedule_steps(graph_->size(), graph_->max_degree(), eps_s / 2.0, options.constant);
}

std::vector<std::uint32_t> ContinuousSampler::discrete_sample(std::uint64_t seed, std::uint64_t attempt) const {
  if (interval_) {
    Rng rng(seed, stream_key(attempt, 1));
    return interval_->sample(rng);
  }
  ChainState state(graph_->size(), seed, stream_key(attempt, 1));
  run_chain(state, *graph_, steps_);
  return state.occupied_vertices();
}

ContinuousSample ContinuousSampler::sample(std::uint64_t seed) const {
  ContinuousSample out;
  out.seed = seed;
  for (std::size_t attempt = 0; attempt <= options_.max_retries; ++attempt) {
    const auto vertices = discrete_sample(seed, attempt);
    out.config = perturb(allocation_, model_.q(), vertices, stream_key(seed, stream_key(attempt, 2)));
    out.retries = attempt;
    if (is_valid(model_, out.config)) {
      out.valid = true;
      return out;
    }
    ++out.invalid_attempts;
  }
  out.valid = false;
  return out;
}

ContinuousSample sample_continuous(const ModelSpec& model, double eps_s, std::uint64_t seed,
                                   const ContinuousOptions& options) {
  return ContinuousSampler(model, eps_s, options).sample(seed);
}

}  // namespace hardgrid
