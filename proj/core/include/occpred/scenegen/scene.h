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

#ifndef OCCPRED_SCENEGEN_SCENE_H_
#define OCCPRED_SCENEGEN_SCENE_H_

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "occpred/voxel/grid.h"

namespace occpred {

enum class SceneKind {
  kCorridor,    // long along y, start and goal at opposite ends
  kSquareRoom,  // floor-to-ceiling columns, start and goal on opposite x sides
  kBoxField,    // floor-standing boxes of random height, start/goal on opposite x sides
};

const char* ToString(SceneKind kind);
SceneKind SceneKindFromString(const std::string& name);

struct SceneSpec {
  SceneKind kind = SceneKind::kBoxField;
  Eigen::Vector3d extents{8.0, 8.0, 2.0};  // metres
  double resolution = 0.1;
  int obstacle_count = 12;
  double obstacle_min_size = 0.4;  // footprint edge, metres
  double obstacle_max_size = 1.2;
  // Box heights for kBoxField; kCorridor and kSquareRoom use full height.
  double obstacle_min_height = 0.6;
  double obstacle_max_height = 2.0;
  std::uint64_t seed = 0;
  double clearance = 0.6;  // free radius around start and goal
  // Reachability is checked through cells at least this far from obstacles.
  double passage_clearance = 0.0;
  int max_retries = 20;
  std::int64_t max_cells = 64LL * 1024 * 1024;

  void Validate() const;
  GridDims Dims() const;
};

struct Scene {
  OccupancyGrid grid;  // every cell known: 0 free, 1 occupied
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  SceneSpec spec;
};

// Deterministic in `spec` (including its seed). Throws kGenerationFailed when
// start/goal cannot be connected with the requested clearance after
// spec.max_retries attempts.
Scene GenerateScene(const SceneSpec& spec);

double OccupiedFraction(const OccupancyGrid& grid, double threshold = kDefaultOccupancyThreshold);
inline double OccupiedFraction(const Scene& scene) { return OccupiedFraction(scene.grid); }

// 6-connected BFS over cells that are free and (optionally) at least
// `clearance` metres from any occupied cell.
bool Reachable(const OccupancyGrid& grid, const Eigen::Vector3d& from, const Eigen::Vector3d& to,
               double clearance = 0.0);

}  // namespace occpred

#endif  // OCCPRED_SCENEGEN_SCENE_H_
