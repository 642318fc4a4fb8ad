#pragma once

#include <string>

#include "heatlands/group_model.hpp"
#include "heatlands/symbolcore.hpp"
#include "json.hpp"

namespace heatlands {

// ParseError on malformed JSON, Resource when the file cannot be read.
nlohmann::json read_json_file(const std::string& path);
// Two-space indentation and a trailing newline; creates parent directories.
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

OperatorSpec load_spec(const std::string& path);
// A built-in name or a path to a group JSON file.
GroupModel load_group(const std::string& name_or_path, double chart_radius, int euclid_dim);

}  // namespace heatlands
