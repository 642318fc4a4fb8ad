#include "heatlands/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "heatlands/errors.hpp"

namespace heatlands {

namespace fs = std::filesystem;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Resource, "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Resource, "cannot open " + path);
  os << text;
}

void write_json_file(const std::string& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

OperatorSpec load_spec(const std::string& path) {
  return spec_from_json(read_json_file(path));
}

GroupModel load_group(const std::string& name_or_path, double chart_radius, int euclid_dim) {
  if (!fs::exists(name_or_path)) return GroupModel::builtin(name_or_path, chart_radius, euclid_dim);
  return GroupModel::from_json(read_json_file(name_or_path));
}

}  // namespace heatlands
