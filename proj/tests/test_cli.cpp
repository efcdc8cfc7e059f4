#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "hardgrid/discretize.hpp"
#include "hardgrid/graph_io.hpp"
#include "hardgrid/hardcore.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using hardgrid::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "hardgrid_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = (workdir() / name).string();
  std::ofstream(path) << text;
  return path;
}

std::string strip_wall_time(std::string s) { return std::regex_replace(s, std::regex("\"wall_time_ms\": [0-9.e+-]+"), ""); }

const char* kRods = R"({"dimension": 1, "side_length": 10.0, "types": [{"name": "rod", "fugacity": 1.0}],
  "interaction": {"preset": "hard_sphere", "radius": 0.25}})";
const char* kPair = R"({"dimension": 2, "side_length": 1.0, "types": [{"fugacity": 0.2}, {"fugacity": 0.1}],
  "interaction": {"preset": "widom_rowlinson", "radii": [0.1, 0.15]}})";

}  // namespace

TEST_CASE("usage errors") {
  CHECK(call({}).code == 1);
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({"zhat", "guess", "x.json"}).code == 1);
  CHECK(call({"--help"}).code == 0);
  CHECK(call({"--version"}).out.find("0.1.0") != std::string::npos);
}

TEST_CASE("model validate") {
  const auto good = write("rods.json", kRods);
  auto r = call({"model", "validate", good});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["uniform_condition"]["satisfied"] == true);
  const auto bad = write("bad.json", "{\"dimension\": 1, \"side_length\": 1, \"types\": [{\"fugacity\": -2}], "
                                     "\"interaction\": {\"preset\": \"hard_sphere\", \"radius\": 0.1}}");
  r = call({"model", "validate", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("types[0].fugacity") != std::string::npos);
  r = call({"model", "validate", write("broken.json", "{oops")});
  CHECK(r.code == 2);
  CHECK(r.err.find("config") != std::string::npos);
  const auto dense = write("dense.json", R"({"dimension": 1, "side_length": 1.0, "types": [{"fugacity": 3.0}],
    "interaction": {"preset": "hard_sphere", "radius": 0.25}})");
  CHECK(call({"model", "validate", dense}).code == 0);
  r = call({"--strict", "model", "validate", dense});
  CHECK(r.code == 3);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("zhat exact on an exported graph matches the library") {
  const auto model = hardgrid::ModelSpec::widom_rowlinson(2, 1.0, {0.15, 0.2}, {0.5, 0.8});
  const auto g = hardgrid::build_graph(model, hardgrid::random_point_set(model.region(), 5, 3));
  const auto path = (workdir() / "ten.bin").string();
  hardgrid::write_graph_binary(path, g);
  const auto r = call({"zhat", "exact", path, "--manifest", (workdir() / "m.json").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["method"] == "exact");
  CHECK(j["ln_z"].get<double>() == hardgrid::exact_log_z(g.to_weighted()).log());
  CHECK(j["diagnostics"]["num_vertices"] == 10);
  std::vector<std::string> keys;
  for (auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"method", "ln_z", "eps_a", "seed", "wall_time_ms", "diagnostics"});
  std::ifstream mf(workdir() / "m.json");
  const auto manifest = nlohmann::ordered_json::parse(mf);
  keys.clear();
  for (auto& [k, v] : manifest.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"command_line", "config_hash", "seed", "version", "wall_time_ms", "outputs",
                                         "exit_code", "summary"});
}

TEST_CASE("zhat is reproducible across runs and thread counts") {
  const auto cfg = write("pair.json", kPair);
  const auto graph = (workdir() / "pair.bin").string();
  REQUIRE(call({"discretize", cfg, "--random-points", "7", "--seed", "2", "-o", graph}).code == 0);
  const auto a = call({"zhat", "mcmc", graph, "--eps-a", "0.3", "--seed", "7", "--threads", "1"});
  const auto b = call({"zhat", "mcmc", graph, "--eps-a", "0.3", "--seed", "7", "--threads", "3"});
  REQUIRE(a.code == 0);
  CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));
  const auto c = call({"zhat", "weitz", graph, "--eps-a", "0.05"});
  REQUIRE(c.code == 0);
  const auto e = call({"zhat", "exact", graph});
  CHECK(std::abs(nlohmann::json::parse(c.out)["ln_z"].get<double>() - nlohmann::json::parse(e.out)["ln_z"].get<double>()) <=
        0.05);
}

TEST_CASE("seed fallback from the environment") {
  const auto cfg = write("pair2.json", kPair);
  ::setenv("HARDGRID_SEED", "41", 1);
  const auto a = call({"oracle", "mc", cfg, "--tol", "0.2"});
  ::unsetenv("HARDGRID_SEED");
  const auto b = call({"oracle", "mc", cfg, "--tol", "0.2", "--seed", "41"});
  REQUIRE(a.code == 0);
  CHECK(nlohmann::json::parse(a.out)["seed"] == 41);
  CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));
  ::setenv("HARDGRID_SEED", "abc", 1);
  CHECK(call({"oracle", "mc", cfg}).code == 1);
  ::unsetenv("HARDGRID_SEED");
}

TEST_CASE("continuous samples") {
  const auto cfg = write("rods2.json", kRods);
  const auto out = (workdir() / "sample.json").string();
  const auto r = call({"sample", "continuous", cfg, "--eps-s", "0.1", "--seed", "5", "-o", out});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out + ".manifest.json"));
  std::ifstream f(out);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto j = nlohmann::json::parse(text);
  CHECK(j["valid"] == true);
  CHECK(j["n"] == j["points"].size());
  CHECK(j["seed"] == 5);
  std::smatch m;
  REQUIRE(std::regex_search(text, m, std::regex("\\[\\[([0-9.e-]+)\\]")));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", j["points"][0][0].get<double>());
  CHECK(m[1].str() == buf);
}

TEST_CASE("experiments write per-trial CSV") {
  const auto cfg = write("rods3.json", kRods);
  auto r = call({"experiment", "concentration", cfg, "--n", "500", "--n", "2000", "--trials", "5", "--seed", "1"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "trial,n,ln_z_hc,ln_z_ref,deviation");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 10);
  r = call({"experiment", "tightness", cfg, "--eps-d", "1", "--n", "20"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("\"not_approximated\":true") != std::string::npos);
}
