#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hardgrid/config.hpp"
#include "hardgrid/continuous.hpp"
#include "hardgrid/discretize.hpp"
#include "hardgrid/errors.hpp"
#include "hardgrid/estimate.hpp"
#include "hardgrid/experiments.hpp"
#include "hardgrid/glauber.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/model.hpp"
#include "hardgrid/parallel.hpp"

namespace py = pybind11;
using namespace hardgrid;
using py::arg;

namespace {

using Release = py::call_guard<py::gil_scoped_release>;

std::vector<std::vector<double>> matrix_rows(const SquareMatrix& m) {
  std::vector<std::vector<double>> rows(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) rows[i][j] = m(i, j);
  return rows;
}

py::dict regime_dict(const RegimeCheck& r) {
  py::dict d;
  d["satisfied"] = r.satisfied;
  d["detail"] = r.detail;
  return d;
}

py::dict trial_rows(const std::vector<TrialRow>& rows) {
  std::vector<std::size_t> trial, n;
  std::vector<double> hc, ref, dev;
  for (const auto& r : rows) {
    trial.push_back(r.trial);
    n.push_back(r.n);
    hc.push_back(r.ln_z_hc);
    ref.push_back(r.ln_z_ref);
    dev.push_back(r.deviation);
  }
  py::dict d;
  d["trial"] = trial;
  d["n"] = n;
  d["ln_z_hc"] = hc;
  d["ln_z_ref"] = ref;
  d["deviation"] = dev;
  return d;
}

SamplerBackend parse_backend(const std::string& name) {
  if (name == "auto") return SamplerBackend::automatic;
  if (name == "glauber") return SamplerBackend::glauber;
  if (name == "interval") return SamplerBackend::interval_exact;
  throw ValidationError("backend", "expected auto, glauber or interval, got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_hardgrid, m) {
  m.doc() = "Hard-constraint point processes via hard-core discretization";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<UndersampledError>(m, "UndersampledError", base.ptr());

  m.def("set_thread_count", &set_thread_count, arg("threads"));
  m.def("thread_count", &thread_count);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](int dimension, double side_length, std::vector<std::vector<double>> interaction,
                       std::vector<double> fugacities) {
             std::vector<double> flat;
             for (auto& row : interaction) flat.insert(flat.end(), row.begin(), row.end());
             return ModelSpec(Region(dimension, side_length), InteractionMatrix(SquareMatrix(interaction.size(), flat)),
                              Fugacities(std::move(fugacities)));
           }),
           arg("dimension"), arg("side_length"), arg("interaction"), arg("fugacities"))
      .def_static("hard_sphere", &ModelSpec::hard_sphere, arg("dimension"), arg("side_length"), arg("radius"),
                  arg("fugacity"))
      .def_static("widom_rowlinson", &ModelSpec::widom_rowlinson, arg("dimension"), arg("side_length"), arg("radii"),
                  arg("fugacities"))
      .def_static("from_json", &parse_model_config, arg("text"))
      .def_static("load", &load_model_config, arg("path"))
      .def("to_json", &model_to_json)
      .def_property_readonly("dimension", &ModelSpec::dimension)
      .def_property_readonly("side_length", [](const ModelSpec& s) { return s.region().side_length(); })
      .def_property_readonly("q", &ModelSpec::q)
      .def_property_readonly("volume", &ModelSpec::volume)
      .def_property_readonly("fugacities", [](const ModelSpec& s) { return s.fugacities().values(); })
      .def_property_readonly("interaction", [](const ModelSpec& s) { return matrix_rows(s.interaction().matrix()); })
      .def("with_fugacities", &ModelSpec::with_fugacities, arg("fugacities"))
      .def("__repr__", [](const ModelSpec& s) {
        return "ModelSpec(d=" + std::to_string(s.dimension()) + ", q=" + std::to_string(s.q()) +
               ", volume=" + std::to_string(s.volume()) + ")";
      });

  m.def("ball_volume", &ball_volume, arg("dimension"), arg("radius"));
  m.def("volume_exclusion_matrix", [](const ModelSpec& s) { return matrix_rows(volume_exclusion_matrix(s)); });
  m.def("log_z_upper_bound", &log_z_upper_bound, arg("model"));
  m.def("check_uniform_condition", [](const ModelSpec& s) {
    const auto r = check_uniform_condition(s);
    py::dict d;
    d["satisfied"] = r.satisfied;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    return d;
  });
  m.def("check_clique_condition", [](const ModelSpec& s) {
    const auto r = check_clique_condition(s);
    py::dict d;
    d["feasible"] = r.feasible();
    d["witness"] = r.witness;
    d["spectral_radius"] = r.spectral_radius;
    d["method"] = r.method;
    return d;
  });

  py::class_<WeightedGraph>(m, "WeightedGraph")
      .def(py::init<std::size_t, const std::vector<std::pair<std::uint32_t, std::uint32_t>>&, std::vector<double>>(),
           arg("num_vertices"), arg("edges"), arg("weights"))
      .def("__len__", &WeightedGraph::size)
      .def_property_readonly("weights", &WeightedGraph::weights)
      .def_property_readonly("edges", &WeightedGraph::edges)
      .def_property_readonly("max_degree", &WeightedGraph::max_degree)
      .def("has_edge", &WeightedGraph::has_edge, arg("u"), arg("v"))
      .def("neighbors", [](const WeightedGraph& g, std::size_t v) {
        const auto n = g.neighbors(v);
        return std::vector<std::uint32_t>(n.begin(), n.end());
      });

  m.def(
      "resolution_for_error",
      [](const ModelSpec& s, double eps_d, bool adaptive) {
        return resolution_for_error(s, eps_d, adaptive ? ResolutionMode::adaptive : ResolutionMode::closed_form);
      },
      arg("model"), arg("eps_d"), arg("adaptive") = false);
  m.def("sampling_resolution", &sampling_resolution, arg("model"), arg("eps_s"));
  m.def("discretization_error_factor", &discretization_error_factor, arg("model"), arg("n"), arg("delta"), arg("eps"));
  m.def(
      "canonical_graph",
      [](const ModelSpec& s, double resolution) {
        return build_graph(s, CanonicalPointSet(s.region(), resolution).materialize()).to_weighted();
      },
      arg("model"), arg("resolution"), Release());
  m.def(
      "random_graph",
      [](const ModelSpec& s, std::size_t n, std::uint64_t seed) {
        return build_graph(s, random_point_set(s.region(), n, seed)).to_weighted();
      },
      arg("model"), arg("num_points"), arg("seed"), Release());
  m.def(
      "canonical_log_z",
      [](const ModelSpec& s, double resolution) {
        return exact_log_z(build_graph(s, CanonicalPointSet(s.region(), resolution).materialize())).log();
      },
      arg("model"), arg("resolution"), Release());

  m.def("exact_log_z", [](const WeightedGraph& g) { return exact_log_z(g).log(); }, arg("graph"), Release());
  m.def("naive_log_z", [](const WeightedGraph& g) { return naive_log_z(g).log(); }, arg("graph"), Release());
  m.def(
      "exact_log_z_1d",
      [](const std::vector<double>& x, double sigma, double w) { return exact_log_z_1d(x, sigma, w).log(); },
      arg("positions"), arg("sigma"), arg("weight"), Release());
  m.def("multiset_log_z", [](const WeightedGraph& g) { return multiset_log_z(g).log(); }, arg("graph"));
  m.def("exact_marginals", &exact_marginals, arg("graph"), Release());
  m.def("tree_threshold", &tree_threshold, arg("max_degree"));

  m.def("check_regime", [](const WeightedGraph& g) { return regime_dict(check_regime(g)); }, arg("graph"));
  m.def("schedule_steps", &schedule_steps, arg("num_vertices"), arg("max_degree"), arg("eps_s"),
        arg("constant") = 1.0);
  m.def(
      "glauber_sample",
      [](const WeightedGraph& g, double eps_s, std::uint64_t seed, double constant,
         std::optional<std::uint64_t> steps) {
        SampleOptions o;
        o.constant = constant;
        o.steps = steps;
        return sample(g, eps_s, seed, o).occupied;
      },
      arg("graph"), arg("eps_s"), arg("seed"), arg("constant") = 1.0, arg("steps") = py::none(), Release());

  m.def(
      "estimate_log_z_mcmc",
      [](const WeightedGraph& g, double eps_a, std::uint64_t seed, std::optional<std::size_t> restarts,
         double constant) {
        McmcOptions o;
        o.restarts = restarts;
        o.constant = constant;
        McmcEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_log_z_mcmc(g, eps_a, seed, o);
        }
        py::dict d;
        d["ln_z"] = e.log_z.log();
        d["ratios"] = e.ratios;
        d["std_errors"] = e.std_errors;
        d["order"] = e.order;
        d["restarts"] = e.restarts;
        d["total_steps"] = e.total_steps;
        d["regime"] = regime_dict(e.regime);
        return d;
      },
      arg("graph"), arg("eps_a"), arg("seed"), arg("restarts") = py::none(), arg("constant") = 1.0);
  m.def(
      "estimate_log_z_weitz",
      [](const WeightedGraph& g, double eps_a) {
        WeitzEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_log_z_weitz(g, eps_a);
        }
        py::dict d;
        d["ln_z"] = e.log_z.log();
        d["depth"] = e.depth;
        d["converged"] = e.converged;
        d["exact"] = e.exact;
        d["history"] = e.history;
        d["regime"] = regime_dict(e.regime);
        return d;
      },
      arg("graph"), arg("eps_a"));

  m.def("tonks_log_z", [](double l, double r, double lam) { return tonks_log_z(l, r, lam).log(); },
        arg("side_length"), arg("radius"), arg("fugacity"));
  m.def(
      "oracle_log_z_mc",
      [](const ModelSpec& s, double tol, std::uint64_t seed, std::optional<std::size_t> samples) {
        OracleEstimate e;
        {
          py::gil_scoped_release release;
          e = oracle_log_z_mc(s, tol, seed, samples);
        }
        py::dict d;
        d["ln_z"] = e.ln_z;
        d["std_error"] = e.std_error;
        d["truncation"] = e.truncation;
        d["samples_per_term"] = e.samples_per_term;
        return d;
      },
      arg("model"), arg("tol"), arg("seed"), arg("samples_per_term") = py::none());
  m.def(
      "is_valid",
      [](const ModelSpec& s, const std::vector<std::vector<double>>& points, const std::vector<std::uint32_t>& types) {
        ContinuousConfiguration c;
        c.dimension = s.dimension();
        for (const auto& p : points) c.coords.insert(c.coords.end(), p.begin(), p.end());
        c.types = types;
        return is_valid(s, c);
      },
      arg("model"), arg("points"), arg("types"));
  m.def(
      "sample_continuous",
      [](const ModelSpec& s, double eps_s, std::uint64_t seed, const std::string& backend, std::size_t max_retries) {
        ContinuousOptions o;
        o.backend = parse_backend(backend);
        o.max_retries = max_retries;
        ContinuousSample r;
        {
          py::gil_scoped_release release;
          r = sample_continuous(s, eps_s, seed, o);
        }
        std::vector<std::vector<double>> points;
        for (std::size_t i = 0; i < r.config.size(); ++i) {
          const auto p = r.config.position(i);
          points.emplace_back(p.begin(), p.end());
        }
        py::dict d;
        d["points"] = points;
        d["types"] = r.config.types;
        d["valid"] = r.valid;
        d["retries"] = r.retries;
        d["invalid_attempts"] = r.invalid_attempts;
        d["seed"] = r.seed;
        return d;
      },
      arg("model"), arg("eps_s"), arg("seed"), arg("backend") = "auto", arg("max_retries") = 16);

  m.def(
      "concentration_trial",
      [](const ModelSpec& s, std::size_t n, std::size_t trials, double eps_d, std::uint64_t seed) {
        ConcentrationReport r;
        {
          py::gil_scoped_release release;
          r = concentration_trial(s, n, trials, eps_d, seed);
        }
        py::dict d;
        d["n"] = r.n;
        d["trials"] = r.trials;
        d["reference_ln_z"] = r.reference_ln_z;
        d["fraction_within"] = r.fraction_within;
        d["median_deviation"] = r.median_deviation;
        d["rows"] = trial_rows(r.rows);
        return d;
      },
      arg("model"), arg("n"), arg("trials"), arg("eps_d"), arg("seed"));
  m.def(
      "expectation_check",
      [](const ModelSpec& s, std::size_t n, std::size_t trials, std::uint64_t seed) {
        ExpectationReport r;
        {
          py::gil_scoped_release release;
          r = expectation_check(s, n, trials, seed);
        }
        py::dict d;
        d["mean_ln_z"] = r.mean_ln_z;
        d["ln_z_ref"] = r.ln_z_ref;
        d["std_error"] = r.std_error;
        d["pass"] = r.pass;
        d["rows"] = trial_rows(r.rows);
        return d;
      },
      arg("model"), arg("n"), arg("trials"), arg("seed"));
  m.def("tightness_check", &tightness_check, arg("fugacity"), arg("volume"), arg("n"), arg("eps_d"));
  m.def("tightness_threshold", &tightness_threshold, arg("fugacity"), arg("volume"), arg("eps_d"));
}
