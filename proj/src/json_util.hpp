#pragma once

// Internal helpers for schema-checked JSON reading.

#include <initializer_list>
#include <string>
#include <string_view>

#include "artic/error.hpp"
#include "artic/geometry.hpp"
#include "json.hpp"

namespace artic::detail {

using nlohmann::json;

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    int line = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(std::string("malformed JSON: ") + e.what(), line);
  }
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  expect_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) schema_error(path + "." + key, "unknown key");
  }
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema_error(path + "." + key, "missing required key");
  return *it;
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

inline long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<long long>();
}

inline Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) schema_error(path, "expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace artic::detail
