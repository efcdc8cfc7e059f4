#include "cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hardgrid/config.hpp"
#include "hardgrid/continuous.hpp"
#include "hardgrid/discretize.hpp"
#include "hardgrid/errors.hpp"
#include "hardgrid/estimate.hpp"
#include "hardgrid/experiments.hpp"
#include "hardgrid/glauber.hpp"
#include "hardgrid/graph_io.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/model.hpp"
#include "hardgrid/parallel.hpp"

namespace hardgrid::cli {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kGraphMagic = "HDGRID01";

struct Options {
  std::size_t threads = 0;
  bool strict = false;
  std::string manifest;
  std::string input;
  std::string output;
  std::string method;
  std::optional<std::uint64_t> seed;
  double eps_d = 0.0;
  double eps_a = 0.1;
  double eps_s = 0.1;
  double tol = 0.05;
  bool adaptive = false;
  std::string format = "binary";
  std::size_t random_points = 0;
  std::size_t restarts = 0;
  double constant = 1.0;
  std::uint64_t steps = 0;
  std::string backend = "auto";
  std::size_t max_retries = 16;
  std::size_t samples = 0;
  std::vector<std::size_t> ns;
  std::size_t trials = 400;
  double target = 0.9;
};

struct Run {
  Run(const Options& o, std::ostream& out_stream, std::ostream& err_stream, std::uint64_t s)
      : opt(o), out(out_stream), err(err_stream), seed(s) {}

  const Options& opt;
  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 0;
  Clock::time_point start = Clock::now();
  std::vector<std::string> outputs;
  Json summary;

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }

  void emit(const std::string& text) {
    if (opt.output.empty()) {
      out << text;
      return;
    }
    std::ofstream f(opt.output);
    if (!f) throw ValidationError("output", "cannot open '" + opt.output + "' for writing");
    f << text;
    outputs.push_back(opt.output);
  }

  /// False when the run must stop with the regime exit code.
  bool regime_gate(bool satisfied, const std::string& detail) {
    if (satisfied) return true;
    err << "warning: " << detail << "\n";
    return !opt.strict;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("input", "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

bool is_graph_file(const std::string& bytes) { return bytes.starts_with(kGraphMagic); }

std::string fmt17(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex64(std::uint64_t x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

HardCoreGraph discretize_model(const ModelSpec& model, double eps_d, bool adaptive) {
  if (!(eps_d > 0.0)) throw ValidationError("--eps-d", "must be positive");
  const double rho = resolution_for_error(model, eps_d, adaptive ? ResolutionMode::adaptive : ResolutionMode::closed_form);
  return build_graph(model, CanonicalPointSet(model.region(), rho).materialize());
}

bool interval_graph(const HardCoreGraph& g) { return g.points().dimension == 1 && g.q() == 1; }

bool model_regime(const ModelSpec& model) { return check_clique_condition(model).feasible(); }

// ---------------------------------------------------------------------------

int cmd_validate(Run& run) {
  const ModelSpec model = parse_model_config(read_file(run.opt.input));
  Json j;
  j["valid"] = true;
  j["dimension"] = model.dimension();
  j["side_length"] = model.region().side_length();
  j["q"] = model.q();
  j["types"] = model.type_names();
  j["fugacities"] = model.fugacities().values();
  j["volume"] = model.volume();
  const bool constrained = std::isfinite(model.interaction().lambda_min());
  bool uniform_ok = !constrained;
  if (constrained) {
    const ConditionReport u = check_uniform_condition(model);
    uniform_ok = u.satisfied;
    j["uniform_condition"] = {{"satisfied", u.satisfied}, {"lhs", u.lhs}, {"rhs", u.rhs}, {"message", u.describe()}};
  } else {
    j["uniform_condition"] = nullptr;
  }
  const CliqueReport c = check_clique_condition(model);
  j["clique_condition"] = {{"feasible", c.feasible()},
                           {"spectral_radius", c.spectral_radius},
                           {"method", c.method},
                           {"witness", c.witness},
                           {"detail", c.detail}};
  run.emit(j.dump(2) + "\n");
  if (!run.regime_gate(uniform_ok || c.feasible(), "no approximability condition certified: " + c.detail)) return kRegime;
  return kOk;
}

int cmd_discretize(Run& run) {
  const auto& opt = run.opt;
  const ModelSpec model = parse_model_config(read_file(opt.input));
  std::optional<HardCoreGraph> graph;
  double rho = 0.0;
  if (opt.random_points > 0) {
    graph.emplace(build_graph(model, random_point_set(model.region(), opt.random_points, run.seed)));
  } else {
    graph.emplace(discretize_model(model, opt.eps_d, opt.adaptive));
    rho = graph->points().resolution;
  }
  if (opt.format == "text")
    write_graph_text(opt.output, *graph);
  else
    write_graph_binary(opt.output, *graph);
  run.outputs.push_back(opt.output);

  std::uint64_t edges = 0;
  for (std::size_t v = 0; v < graph->num_vertices(); ++v) edges += graph->degree(v);
  Json j;
  j["points"] = opt.random_points > 0 ? "random" : "canonical";
  j["resolution"] = rho;
  j["mode"] = opt.adaptive ? "adaptive" : "closed_form";
  j["eps_d"] = opt.eps_d;
  j["num_points"] = graph->num_points();
  j["num_vertices"] = graph->num_vertices();
  j["edges"] = edges / 2;
  j["max_degree"] = graph->max_degree();
  j["type_weights"] = graph->type_weights();
  if (rho > 0.0) {
    try {
      const double eps = std::sqrt(static_cast<double>(model.dimension())) / rho;
      j["error_factor"] = number_or_null(
          discretization_error_factor(model, static_cast<double>(graph->num_points()), 0.0, eps));
    } catch (const PreconditionError&) {
      j["error_factor"] = nullptr;
    }
  }
  j["output"] = opt.output;
  run.out << j.dump(2) << "\n";
  run.summary = j;
  return kOk;
}

int cmd_zhat(Run& run) {
  const auto& opt = run.opt;
  if (!(opt.eps_a > 0.0 && opt.eps_a <= 1.0)) throw ValidationError("--eps-a", "must lie in (0, 1]");
  const std::string bytes = read_file(opt.input);
  std::optional<HardCoreGraph> hc;
  WeightedGraph graph;
  bool clique = false;
  Json diag;
  if (is_graph_file(bytes)) {
    GraphFile f = read_graph_binary(opt.input);
    graph = std::move(f.graph);
    diag["input"] = "graph";
  } else {
    const ModelSpec model = parse_model_config(bytes);
    if (!(opt.eps_d > 0.0)) throw ValidationError("--eps-d", "required when the input is a model configuration");
    hc.emplace(discretize_model(model, opt.eps_d, opt.adaptive));
    clique = model_regime(model);
    diag["input"] = "config";
    diag["resolution"] = hc->points().resolution;
    if (opt.method != "exact" || !interval_graph(*hc)) graph = hc->to_weighted();
  }
  const std::size_t nv = hc ? hc->num_vertices() : graph.size();
  diag["num_vertices"] = nv;
  diag["max_degree"] = hc ? hc->max_degree() : graph.max_degree();

  Json j;
  j["method"] = opt.method;
  LogWeight ln_z;
  if (opt.method == "exact") {
    if (hc && interval_graph(*hc)) {
      ln_z = exact_log_z(*hc);
      diag["solver"] = "interval";
    } else {
      diag["solver"] = graph.size() > kExactVertexCap ? "interval" : "branching";
      ln_z = exact_log_z(graph);
    }
  } else {
    const RegimeCheck regime = check_regime(graph, clique);
    diag["regime_satisfied"] = regime.satisfied;
    diag["regime_detail"] = regime.detail;
    if (!run.regime_gate(regime.satisfied, regime.detail)) return kRegime;
    if (opt.method == "mcmc") {
      McmcOptions mo;
      mo.constant = opt.constant;
      mo.clique_certified = clique;
      if (opt.restarts > 0) mo.restarts = opt.restarts;
      const McmcEstimate e = estimate_log_z_mcmc(graph, opt.eps_a, run.seed, mo);
      ln_z = e.log_z;
      diag["restarts"] = e.restarts;
      diag["total_steps"] = e.total_steps;
      double min_ratio = 1.0;
      for (double r : e.ratios) min_ratio = std::min(min_ratio, r);
      diag["min_ratio"] = min_ratio;
    } else {
      const WeitzEstimate e = estimate_log_z_weitz(graph, opt.eps_a);
      ln_z = e.log_z;
      diag["depth"] = e.depth;
      diag["converged"] = e.converged;
      diag["exact"] = e.exact;
      diag["history"] = e.history;
      diag["detail"] = e.detail;
      if (!e.converged) run.err << "warning: " << e.detail << "\n";
    }
  }
  j["ln_z"] = ln_z.log();
  j["eps_a"] = opt.eps_a;
  j["seed"] = run.seed;
  j["wall_time_ms"] = run.elapsed_ms();
  j["diagnostics"] = diag;
  run.emit(j.dump(2) + "\n");
  run.summary = {{"method", opt.method}, {"ln_z", ln_z.log()}};
  return kOk;
}

std::string sample_json(const ContinuousConfiguration& config, bool valid, std::size_t retries, std::uint64_t seed,
                        const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream s;
  s << "{\"n\": " << config.size() << ", \"points\": [";
  for (std::size_t i = 0; i < config.size(); ++i) {
    s << (i ? ", [" : "[");
    const auto p = config.position(i);
    for (std::size_t a = 0; a < p.size(); ++a) s << (a ? ", " : "") << fmt17(p[a]);
    s << "]";
  }
  s << "], \"types\": [";
  for (std::size_t i = 0; i < config.size(); ++i) s << (i ? ", " : "") << config.types[i];
  s << "], \"valid\": " << (valid ? "true" : "false") << ", \"retries\": " << retries << ", \"seed\": " << seed;
  for (const auto& [k, v] : extra) s << ", \"" << k << "\": " << v;
  s << "}\n";
  return s.str();
}

int cmd_sample(Run& run) {
  const auto& opt = run.opt;
  if (!(opt.eps_s > 0.0 && opt.eps_s <= 1.0)) throw ValidationError("--eps-s", "must lie in (0, 1]");
  const ModelSpec model = parse_model_config(read_file(opt.input));
  if (opt.method == "discrete") {
    const double rho = opt.eps_d > 0.0
                           ? resolution_for_error(model, opt.eps_d,
                                                  opt.adaptive ? ResolutionMode::adaptive : ResolutionMode::closed_form)
                           : sampling_resolution(model, opt.eps_s);
    const HardCoreGraph hc = build_graph(model, CanonicalPointSet(model.region(), rho).materialize());
    const WeightedGraph graph = hc.to_weighted();
    SampleOptions so;
    so.constant = opt.constant;
    so.clique_certified = model_regime(model);
    if (opt.steps > 0) so.steps = opt.steps;
    const RegimeCheck regime = check_regime(graph, so.clique_certified);
    if (!run.regime_gate(regime.satisfied, regime.detail)) return kRegime;
    const SampleResult r = sample(graph, opt.eps_s, run.seed, so);
    ContinuousConfiguration config;
    config.dimension = model.dimension();
    for (std::uint32_t v : r.occupied) {
      const auto pos = hc.points().position(v / hc.q());
      config.coords.insert(config.coords.end(), pos.begin(), pos.end());
      config.types.push_back(static_cast<std::uint32_t>(v % hc.q()));
    }
    run.emit(sample_json(config, is_valid(model, config), 0, run.seed,
                         {{"resolution", fmt17(rho)}, {"steps", std::to_string(r.steps)}}));
    run.summary = {{"n", config.size()}, {"steps", r.steps}};
    return kOk;
  }
  ContinuousOptions co;
  co.max_retries = opt.max_retries;
  co.constant = opt.constant;
  if (opt.steps > 0) co.steps = opt.steps;
  co.backend = opt.backend == "glauber"    ? SamplerBackend::glauber
               : opt.backend == "interval" ? SamplerBackend::interval_exact
                                           : SamplerBackend::automatic;
  const ContinuousSampler sampler(model, opt.eps_s, co);
  if (!run.regime_gate(sampler.regime().satisfied, sampler.regime().detail)) return kRegime;
  const ContinuousSample s = sampler.sample(run.seed);
  const char* backend = sampler.backend() == SamplerBackend::glauber ? "\"glauber\"" : "\"interval_exact\"";
  run.emit(sample_json(s.config, s.valid, s.retries, s.seed,
                       {{"invalid_attempts", std::to_string(s.invalid_attempts)},
                        {"resolution", fmt17(sampler.resolution())},
                        {"backend", backend}}));
  run.summary = {{"n", s.config.size()}, {"valid", s.valid}, {"retries", s.retries}};
  return kOk;
}

int cmd_oracle(Run& run) {
  const auto& opt = run.opt;
  const ModelSpec model = parse_model_config(read_file(opt.input));
  Json j;
  j["method"] = opt.method;
  if (opt.method == "tonks") {
    if (model.dimension() != 1 || model.q() != 1)
      throw ValidationError("interaction", "the hard-rod closed form needs a one-dimensional single-type model");
    const double ln_z =
        tonks_log_z(model.region().side_length(), model.interaction()(0, 0) / 2.0, model.fugacities()[0]).log();
    j["ln_z"] = ln_z;
    j["std_error"] = 0.0;
  } else {
    if (!(opt.tol > 0.0)) throw ValidationError("--tol", "must be positive");
    const OracleEstimate e =
        oracle_log_z_mc(model, opt.tol, run.seed, opt.samples > 0 ? std::optional(opt.samples) : std::nullopt);
    j["ln_z"] = e.ln_z;
    j["std_error"] = e.std_error;
    j["truncation"] = e.truncation;
    j["samples_per_term"] = e.samples_per_term;
    j["tail_log_bound"] = e.tail_log_bound;
    j["seed"] = run.seed;
  }
  j["tol"] = opt.tol;
  j["wall_time_ms"] = run.elapsed_ms();
  run.emit(j.dump(2) + "\n");
  run.summary = {{"method", opt.method}, {"ln_z", j["ln_z"]}};
  return kOk;
}

void csv_row(std::ostream& s, const TrialRow& r) {
  s << r.trial << ',' << r.n << ',' << fmt17(r.ln_z_hc) << ',' << fmt17(r.ln_z_ref) << ',' << fmt17(r.deviation)
    << '\n';
}

int cmd_experiment(Run& run) {
  const auto& opt = run.opt;
  const ModelSpec model = parse_model_config(read_file(opt.input));
  std::ostringstream csv;
  csv << "trial,n,ln_z_hc,ln_z_ref,deviation\n";
  Json per_n = Json::array();
  if (opt.method == "concentration") {
    const std::vector<std::size_t> ns = opt.ns.empty() ? std::vector<std::size_t>{1000} : opt.ns;
    std::optional<std::size_t> n_star;
    for (std::size_t n : ns) {
      const ConcentrationReport r = concentration_trial(model, n, opt.trials, opt.eps_d, run.seed);
      for (const auto& row : r.rows) csv_row(csv, row);
      if (r.fraction_within >= opt.target && (!n_star || n < *n_star)) n_star = n;
      per_n.push_back({{"n", n},
                       {"fraction_within", r.fraction_within},
                       {"reference_ln_z", r.reference_ln_z},
                       {"min_deviation", r.min_deviation},
                       {"median_deviation", r.median_deviation},
                       {"max_deviation", r.max_deviation}});
    }
    run.summary = {{"experiment", "concentration"}, {"eps_d", opt.eps_d}, {"target", opt.target}};
    run.summary["n_star"] = n_star ? Json(*n_star) : Json(nullptr);
  } else if (opt.method == "expectation") {
    const std::vector<std::size_t> ns = opt.ns.empty() ? std::vector<std::size_t>{1000} : opt.ns;
    for (std::size_t n : ns) {
      const ExpectationReport r = expectation_check(model, n, opt.trials, run.seed);
      for (const auto& row : r.rows) csv_row(csv, row);
      per_n.push_back({{"n", n},
                       {"mean_ln_z", r.mean_ln_z},
                       {"ln_z_ref", r.ln_z_ref},
                       {"std_error", r.std_error},
                       {"ci_low", number_or_null(r.ci_low)},
                       {"ci_high", r.ci_high},
                       {"pass", r.pass}});
    }
    run.summary = {{"experiment", "expectation"}};
  } else {
    if (model.q() != 1) throw ValidationError("types", "tightness uses a single-type model");
    const double lambda = model.fugacities()[0], vol = model.volume();
    const std::vector<std::size_t> ns =
        opt.ns.empty() ? std::vector<std::size_t>{1, 2, 4, 8, 16, 23, 24, 100, 1000, 1000000} : opt.ns;
    std::size_t trial = 0;
    for (std::size_t n : ns) {
      const double nd = static_cast<double>(n);
      const bool fails = tightness_check(lambda, vol, nd, opt.eps_d);
      TrialRow row{trial++, n, nd * std::log1p(lambda * vol / nd), lambda * vol, 0.0};
      row.deviation = row.ln_z_hc - row.ln_z_ref;
      csv_row(csv, row);
      per_n.push_back({{"n", n}, {"not_approximated", fails}});
    }
    run.summary = {{"experiment", "tightness"},
                   {"eps_d", opt.eps_d},
                   {"threshold", tightness_threshold(lambda, vol, opt.eps_d)}};
  }
  run.summary["results"] = per_n;
  run.emit(csv.str());
  return kOk;
}

void write_manifest(const Run& run, const std::vector<std::string>& args, int code) {
  Json m;
  std::string line = "hardgrid";
  for (const auto& a : args) line += " " + a;
  m["command_line"] = line;
  std::string hash;
  if (!run.opt.input.empty()) {
    try {
      hash = hex64(fnv1a(read_file(run.opt.input)));
    } catch (const Error&) {
    }
  }
  m["config_hash"] = hash.empty() ? Json(nullptr) : Json(hash);
  m["seed"] = run.seed;
  m["version"] = kVersion;
  m["wall_time_ms"] = run.elapsed_ms();
  m["outputs"] = run.outputs;
  m["exit_code"] = code;
  m["summary"] = run.summary;
  std::string path = run.opt.manifest;
  if (path.empty() && !run.outputs.empty()) path = run.outputs.front() + ".manifest.json";
  if (path.empty()) {
    run.err << m.dump() << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) {
    run.err << "error: cannot write manifest '" << path << "'\n";
    return;
  }
  f << m.dump(2) << "\n";
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hard-core discretization of hard-constraint point processes", "hardgrid"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  Options opt;
  std::uint64_t seed_value = 0;
  app.add_option("--threads", opt.threads, "worker threads, 0 for available parallelism");
  app.add_flag("--strict", opt.strict, "exit with code 3 when the regime condition fails");
  app.add_option("--manifest", opt.manifest, "run manifest path (default: next to the output, else stderr)");

  auto seed_opt = [&](CLI::App* sub) { return sub->add_option("--seed", seed_value, "random seed (fallback HARDGRID_SEED)"); };
  std::vector<CLI::Option*> seed_options;

  auto* model = app.add_subcommand("model", "model configuration tools");
  model->require_subcommand(1);
  auto* validate = model->add_subcommand("validate", "validate a configuration and report the conditions");
  validate->add_option("config", opt.input, "model configuration (JSON)")->required();
  validate->add_option("-o,--output", opt.output, "write the report here");

  auto* disc = app.add_subcommand("discretize", "build and export the hard-core representation");
  disc->add_option("config", opt.input, "model configuration (JSON)")->required();
  disc->add_option("--eps-d", opt.eps_d, "discretization accuracy");
  disc->add_flag("--adaptive", opt.adaptive, "smallest resolution meeting the error factor");
  disc->add_option("-o,--output", opt.output, "graph file")->required();
  disc->add_option("--format", opt.format, "graph file format")->check(CLI::IsMember({"binary", "text"}));
  disc->add_option("--random-points", opt.random_points, "use this many uniform random points instead of the grid");
  seed_options.push_back(seed_opt(disc));

  auto* zhat = app.add_subcommand("zhat", "partition function of a hard-core representation");
  zhat->add_option("method", opt.method)->required()->check(CLI::IsMember({"exact", "mcmc", "weitz"}));
  zhat->add_option("input", opt.input, "model configuration or graph file")->required();
  zhat->add_option("--eps-a", opt.eps_a, "approximation accuracy");
  zhat->add_option("--eps-d", opt.eps_d, "discretization accuracy for configuration inputs");
  zhat->add_flag("--adaptive", opt.adaptive, "adaptive resolution for configuration inputs");
  zhat->add_option("--restarts", opt.restarts, "override the per-ratio restart count (mcmc)");
  zhat->add_option("--constant", opt.constant, "Glauber schedule constant (mcmc)");
  zhat->add_option("-o,--output", opt.output, "write the result here");
  seed_options.push_back(seed_opt(zhat));

  auto* smp = app.add_subcommand("sample", "draw a discrete or continuous configuration");
  smp->add_option("kind", opt.method)->required()->check(CLI::IsMember({"discrete", "continuous"}));
  smp->add_option("config", opt.input, "model configuration (JSON)")->required();
  smp->add_option("--eps-s", opt.eps_s, "total-variation accuracy");
  smp->add_option("--eps-d", opt.eps_d, "discrete: resolution from this discretization accuracy instead");
  smp->add_flag("--adaptive", opt.adaptive, "discrete: adaptive resolution with --eps-d");
  smp->add_option("--steps", opt.steps, "override the Glauber step count");
  smp->add_option("--constant", opt.constant, "Glauber schedule constant");
  smp->add_option("--backend", opt.backend, "continuous sampler backend")
      ->check(CLI::IsMember({"auto", "glauber", "interval"}));
  smp->add_option("--max-retries", opt.max_retries, "continuous: rejection retries");
  smp->add_option("-o,--output", opt.output, "write the sample here");
  seed_options.push_back(seed_opt(smp));

  auto* orc = app.add_subcommand("oracle", "reference values of the continuous partition function");
  orc->add_option("method", opt.method)->required()->check(CLI::IsMember({"mc", "tonks"}));
  orc->add_option("config", opt.input, "model configuration (JSON)")->required();
  orc->add_option("--tol", opt.tol, "target accuracy of ln Z");
  orc->add_option("--samples", opt.samples, "override samples per series term");
  orc->add_option("-o,--output", opt.output, "write the result here");
  seed_options.push_back(seed_opt(orc));

  auto* exp = app.add_subcommand("experiment", "batch experiments with per-trial CSV output");
  exp->add_option("kind", opt.method)->required()->check(CLI::IsMember({"concentration", "expectation", "tightness"}));
  exp->add_option("config", opt.input, "model configuration (JSON)")->required();
  exp->add_option("--n", opt.ns, "point counts");
  exp->add_option("--trials", opt.trials, "trials per point count");
  exp->add_option("--eps-d", opt.eps_d, "accuracy");
  exp->add_option("--target", opt.target, "concentration: fraction defining n*");
  exp->add_option("-o,--output", opt.output, "CSV output path");
  seed_options.push_back(seed_opt(exp));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  bool seed_given = false;
  for (auto* o : seed_options) seed_given = seed_given || o->count() > 0;
  if (seed_given) {
    opt.seed = seed_value;
  } else if (const char* env = std::getenv("HARDGRID_SEED")) {
    try {
      std::size_t used = 0;
      opt.seed = std::stoull(env, &used);
      if (used != std::string_view(env).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      err << "error: HARDGRID_SEED must be a non-negative integer\n";
      return kUsage;
    }
  }
  if (exp->parsed() && opt.eps_d == 0.0) opt.eps_d = 0.2;

  set_thread_count(opt.threads);
  Run run(opt, out, err, opt.seed.value_or(0));
  int code = kOk;
  try {
    if (validate->parsed())
      code = cmd_validate(run);
    else if (disc->parsed())
      code = cmd_discretize(run);
    else if (zhat->parsed())
      code = cmd_zhat(run);
    else if (smp->parsed())
      code = cmd_sample(run);
    else if (orc->parsed())
      code = cmd_oracle(run);
    else
      code = cmd_experiment(run);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    code = kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kValidation;
  }
  write_manifest(run, args, code);
  return code;
}

}  // namespace hardgrid::cli
