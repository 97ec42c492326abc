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

#ifndef OCCPRED_SCENEGEN_SCENE_IO_H_
#define OCCPRED_SCENEGEN_SCENE_IO_H_

#include <filesystem>
#include <nlohmann/json.hpp>

#include "occpred/scenegen/scene.h"

namespace occpred {

nlohmann::json ToJson(const SceneSpec& spec);
// Missing keys keep their defaults; unknown keys are rejected (kConfigError).
SceneSpec SceneSpecFromJson(const nlohmann::json& json);

// Writes <stem>.ocgr and the <stem>.json sidecar {spec, start, goal}.
void WriteScene(const std::filesystem::path& stem, const Scene& scene);
Scene ReadScene(const std::filesystem::path& stem);

}  // namespace occpred

#endif  // OCCPRED_SCENEGEN_SCENE_IO_H_
