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

#include "occpred/scenegen/scene_io.h"

#include "occpred/common/binary_io.h"
#include "occpred/common/json_util.h"
#include "occpred/voxel/grid_io.h"

namespace occpred {

nlohmann::json ToJson(const SceneSpec& spec) {
  return {{"kind", ToString(spec.kind)},
          {"extents", ToJson(spec.extents)},
          {"resolution", spec.resolution},
          {"obstacle_count", spec.obstacle_count},
          {"obstacle_min_size", spec.obstacle_min_size},
          {"obstacle_max_size", spec.obstacle_max_size},
          {"obstacle_min_height", spec.obstacle_min_height},
          {"obstacle_max_height", spec.obstacle_max_height},
          {"seed", spec.seed},
          {"clearance", spec.clearance},
          {"passage_clearance", spec.passage_clearance},
          {"max_retries", spec.max_retries},
          {"max_cells", spec.max_cells}};
}

SceneSpec SceneSpecFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json,
                    {"kind", "extents", "resolution", "obstacle_count", "obstacle_min_size", "obstacle_max_size",
                     "obstacle_min_height", "obstacle_max_height", "seed", "clearance", "passage_clearance",
                     "max_retries", "max_cells"},
                    "scene spec");
  SceneSpec spec;
  std::string kind = ToString(spec.kind);
  ReadOptional(json, "kind", kind);
  try {
    spec.kind = SceneKindFromString(kind);
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  ReadOptional(json, "extents", spec.extents);
  ReadOptional(json, "resolution", spec.resolution);
  ReadOptional(json, "obstacle_count", spec.obstacle_count);
  ReadOptional(json, "obstacle_min_size", spec.obstacle_min_size);
  ReadOptional(json, "obstacle_max_size", spec.obstacle_max_size);
  ReadOptional(json, "obstacle_min_height", spec.obstacle_min_height);
  ReadOptional(json, "obstacle_max_height", spec.obstacle_max_height);
  ReadOptional(json, "seed", spec.seed);
  ReadOptional(json, "clearance", spec.clearance);
  ReadOptional(json, "passage_clearance", spec.passage_clearance);
  ReadOptional(json, "max_retries", spec.max_retries);
  ReadOptional(json, "max_cells", spec.max_cells);
  return spec;
}

void WriteScene(const std::filesystem::path& stem, const Scene& scene) {
  WriteGrid(std::filesystem::path(stem).concat(".ocgr"), scene.grid);
  const nlohmann::json sidecar = {
      {"spec", ToJson(scene.spec)}, {"start", ToJson(scene.start)}, {"goal", ToJson(scene.goal)}};
  WriteFileText(std::filesystem::path(stem).concat(".json"), sidecar.dump(2) + "\n");
}

Scene ReadScene(const std::filesystem::path& stem) {
  Scene scene;
  scene.grid = ReadGrid(std::filesystem::path(stem).concat(".ocgr"));
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(ReadFileText(std::filesystem::path(stem).concat(".json")));
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIoError, std::string("bad scene sidecar: ") + e.what());
  }
  scene.spec = SceneSpecFromJson(sidecar.at("spec"));
  ReadOptional(sidecar, "start", scene.start);
  ReadOptional(sidecar, "goal", scene.goal);
  return scene;
}

}  // namespace occpred
