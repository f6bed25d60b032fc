#pragma once

// JSON plumbing shared by the file-format readers and writers. Kept out of the
// public headers so only the translation units that parse files pull in json.hpp.

#include <json.hpp>

#include <Eigen/Core>

#include <string>

#include "tng/error.hpp"
#include "tng/geometry.hpp"

namespace tng {

class Environment;

using json = nlohmann::json;

// Parses JSON, converting failures into ParseError carrying line and column.
json parse_json_text(const std::string& text, const std::string& what);

// Typed field access. Errors name the full field path ("trajectories[1].id").
const json& require(const json& obj, const char* key, const std::string& path);
double get_number(const json& value, const std::string& path);
std::int64_t get_integer(const json& value, const std::string& path);
std::uint64_t get_unsigned(const json& value, const std::string& path);
bool get_bool(const json& value, const std::string& path);
std::string get_string(const json& value, const std::string& path);
Eigen::VectorXd get_vector(const json& value, const std::string& path);
void check_format(const json& doc, const std::string& expected, const std::string& what);

json vector_to_json(const Eigen::VectorXd& v);
json pose_to_json(const Pose& p);
Pose pose_from_json(const json& value, const std::string& path);

json environment_to_json(const Environment& env);

}  // namespace tng
