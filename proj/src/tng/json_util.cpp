#include "tng/json_util.hpp"

#include <algorithm>

namespace tng {

namespace {

std::string type_message(const std::string& path, const char* expected) {
  return "field '" + path + "': expected " + expected;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what + ": malformed JSON at line " + std::to_string(line) + ", column " +
                     std::to_string(column));
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(type_message(path.empty() ? "<root>" : path, "object"));
  auto it = obj.find(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (it == obj.end()) throw ParseError("missing field '" + full + "'");
  return *it;
}

double get_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ParseError(type_message(path, "number"));
  return value.get<double>();
}

std::int64_t get_integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) throw ParseError(type_message(path, "integer"));
  return value.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& value, const std::string& path) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  throw ParseError(type_message(path, "non-negative integer"));
}

bool get_bool(const json& value, const std::string& path) {
  if (!value.is_boolean()) throw ParseError(type_message(path, "boolean"));
  return value.get<bool>();
}

std::string get_string(const json& value, const std::string& path) {
  if (!value.is_string()) throw ParseError(type_message(path, "string"));
  return value.get<std::string>();
}

Eigen::VectorXd get_vector(const json& value, const std::string& path) {
  if (!value.is_array()) throw ParseError(type_message(path, "array of numbers"));
  Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = get_number(value[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

void check_format(const json& doc, const std::string& expected, const std::string& what) {
  const std::string tag = get_string(require(doc, "format", ""), "format");
  if (tag != expected) {
    throw ParseError(what + ": unsupported format '" + tag + "', expected '" + expected + "'");
  }
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json pose_to_json(const Pose& p) { return json::array({p.x, p.y, p.theta}); }

Pose pose_from_json(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) throw ParseError(type_message(path, "[x, y, theta]"));
  return {get_number(value[0], path + "[0]"), get_number(value[1], path + "[1]"),
          get_number(value[2], path + "[2]")};
}

}  // namespace tng
