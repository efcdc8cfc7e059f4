#include "hardgrid/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hardgrid/errors.hpp"

namespace hardgrid {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path, "missing required field");
  return *it;
}

double real_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) throw ValidationError(path, "must be a number");
  return v.get<double>();
}

std::vector<double> real_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError(path, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError(path + "[" + std::to_string(i) + "]", "must be a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace

ModelSpec parse_model_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "top level must be an object");

  const json& dim = field(doc, "dimension", "dimension");
  if (!dim.is_number_integer()) throw ValidationError("dimension", "must be an integer");
  const int dimension = dim.get<int>();
  const double side_length = real_field(doc, "side_length", "side_length");
  Region region(dimension, side_length);

  const json& types = field(doc, "types", "types");
  if (!types.is_array() || types.empty()) throw ValidationError("types", "must be a non-empty array");
  std::vector<std::string> names;
  std::vector<double> fugacities;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const std::string path = "types[" + std::to_string(i) + "]";
    const json& t = types[i];
    if (!t.is_object()) throw ValidationError(path, "must be an object");
    auto name = t.find("name");
    if (name != t.end() && !name->is_string()) throw ValidationError(path + ".name", "must be a string");
    names.push_back(name != t.end() ? name->get<std::string>() : "type" + std::to_string(i));
    const double f = real_field(t, "fugacity", path + ".fugacity");
    if (!(f >= 0.0)) throw ValidationError(path + ".fugacity", "must be non-negative");
    fugacities.push_back(f);
  }
  const std::size_t q = types.size();

  const json& inter = field(doc, "interaction", "interaction");
  if (!inter.is_object()) throw ValidationError("interaction", "must be an object");
  const json& preset_v = field(inter, "preset", "interaction.preset");
  if (!preset_v.is_string()) throw ValidationError("interaction.preset", "must be a string");
  const std::string preset = preset_v.get<std::string>();

  if (preset == "hard_sphere") {
    if (q != 1) throw ValidationError("types", "hard_sphere preset requires exactly one type");
    const double r = real_field(inter, "radius", "interaction.radius");
    ModelSpec m = ModelSpec::hard_sphere(dimension, side_length, r, fugacities[0]);
    return ModelSpec(m.region(), m.interaction(), m.fugacities(), names);
  }
  if (preset == "widom_rowlinson") {
    const auto radii = real_array(field(inter, "radii", "interaction.radii"), "interaction.radii");
    if (radii.size() != q) throw ValidationError("interaction.radii", "length must equal the number of types");
    ModelSpec m = ModelSpec::widom_rowlinson(dimension, side_length, radii, fugacities);
    return ModelSpec(m.region(), m.interaction(), m.fugacities(), names);
  }
  if (preset == "matrix") {
    const json& rows = field(inter, "matrix", "interaction.matrix");
    if (!rows.is_array() || rows.size() != q)
      throw ValidationError("interaction.matrix", "must have one row per type");
    std::vector<double> entries;
    for (std::size_t i = 0; i < q; ++i) {
      const std::string path = "interaction.matrix[" + std::to_string(i) + "]";
      auto row = real_array(rows[i], path);
      if (row.size() != q) throw ValidationError(path, "must have one entry per type");
      entries.insert(entries.end(), row.begin(), row.end());
    }
    return ModelSpec(region, InteractionMatrix(SquareMatrix(q, std::move(entries))), Fugacities(fugacities),
                     names);
  }
  throw ValidationError("interaction.preset", "unknown preset '" + preset + "'");
}

ModelSpec load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_config(buffer.str());
}

std::string model_to_json(const ModelSpec& model) {
  json doc;
  doc["dimension"] = model.dimension();
  doc["side_length"] = model.region().side_length();
  doc["types"] = json::array();
  for (std::size_t i = 0; i < model.q(); ++i)
    doc["types"].push_back({{"name", model.type_names()[i]}, {"fugacity", model.fugacities()[i]}});
  json rows = json::array();
  for (std::size_t i = 0; i < model.q(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < model.q(); ++j) row.push_back(model.interaction()(i, j));
    rows.push_back(row);
  }
  doc["interaction"] = {{"preset", "matrix"}, {"matrix", rows}};
  return doc.dump(2);
}

}  // namespace hardgrid
