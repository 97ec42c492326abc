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

#include "occpred/common/json_util.h"

#include <algorithm>

namespace occpred {

void RejectUnknownKeys(const nlohmann::json& json, std::initializer_list<std::string_view> allowed,
                       std::string_view context) {
  Require(json.is_object(), ErrorCode::kConfigError, std::string(context) + " must be an object");
  for (const auto& item : json.items()) {
    const bool known = std::find(allowed.begin(), allowed.end(), item.key()) != allowed.end();
    Require(known, ErrorCode::kConfigError, "unknown key '" + item.key() + "' in " + std::string(context));
  }
}

void ReadOptional(const nlohmann::json& json, const char* key, Eigen::Vector3d& out) {
  if (!json.contains(key)) return;
  const auto& v = json.at(key);
  Require(v.is_array() && v.size() == 3, ErrorCode::kConfigError, std::string("'") + key + "' must be a 3-vector");
  for (int a = 0; a < 3; ++a) {
    Require(v[a].is_number(), ErrorCode::kConfigError, std::string("'") + key + "' must be numeric");
    out[a] = v[a].get<double>();
  }
}

nlohmann::json ToJson(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace occpred
