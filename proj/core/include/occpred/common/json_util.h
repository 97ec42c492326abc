/*
 * Copyright 2026 The occpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OCCPRED_COMMON_JSON_UTIL_H_
#define OCCPRED_COMMON_JSON_UTIL_H_

#include <Eigen/Core>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "occpred/common/error.h"

namespace occpred {

// Throws kConfigError if `json` is not an object or has a key outside `allowed`.
void RejectUnknownKeys(const nlohmann::json& json, std::initializer_list<std::string_view> allowed,
                       std::string_view context);

// Reads `key` into `out` when present; type mismatches become kConfigError.
template <typename T>
void ReadOptional(const nlohmann::json& json, const char* key, T& out) {
  if (!json.contains(key)) return;
  try {
    out = json.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kConfigError, std::string("bad value for '") + key + "': " + e.what());
  }
}

void ReadOptional(const nlohmann::json& json, const char* key, Eigen::Vector3d& out);

nlohmann::json ToJson(const Eigen::Vector3d& v);

}  // namespace occpred

#endif  // OCCPRED_COMMON_JSON_UTIL_H_
