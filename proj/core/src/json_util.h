/*
Copyright 2026 The trajsep Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef TRAJSEP_SRC_JSON_UTIL_H_
#define TRAJSEP_SRC_JSON_UTIL_H_

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "json.hpp"
#include "trajsep/common.h"

namespace trajsep {

inline void to_json(nlohmann::json& j, const Vec3& v) {
  j = nlohmann::json::array({v.x, v.y, v.z});
}

inline void from_json(const nlohmann::json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kMalformed, "expected a 3-element array");
  }
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace json_util {

inline nlohmann::json Parse(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("invalid JSON: ") + e.what());
  }
}

// JSON has no infinity; +/-inf are written as the strings "inf"/"-inf".
inline nlohmann::json FromDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double ToDouble(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kMalformed, "expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

template <typename T>
T Require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kMalformed, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformed,
                std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
T Optional(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return Require<T>(j, key);
}

}  // namespace json_util
}  // namespace trajsep

#endif  // TRAJSEP_SRC_JSON_UTIL_H_
