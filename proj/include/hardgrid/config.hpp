#pragma once

#include <string>
#include <string_view>

#include "hardgrid/model.hpp"

namespace hardgrid {

/*!
 * Parses a model configuration document.
 *
 * Expected layout:
 * {"dimension": 1, "side_length": 10.0,
 *  "types": [{"name": "a", "fugacity": 1.0}],
 *  "interaction": {"preset": "hard_sphere", "radius": 0.25}}
 *
 * The preset is one of "hard_sphere" (field "radius"), "widom_rowlinson"
 * (field "radii", one per type) or "matrix" (field "matrix", q x q).
 * Throws ValidationError naming the offending field.
 */
ModelSpec parse_model_config(std::string_view json_text);

/// Reads and parses a configuration file.
ModelSpec load_model_config(const std::string& path);

/// Serializes a model back into the configuration layout (matrix preset).
std::string model_to_json(const ModelSpec& model);

}  // namespace hardgrid
