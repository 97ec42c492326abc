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

#ifndef OCCPRED_NAVSIM_SENSOR_H_
#define OCCPRED_NAVSIM_SENSOR_H_

#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <vector>

#include "occpred/common/rng.h"
#include "occpred/navmap/double_layer_map.h"
#include "occpred/voxel/grid.h"

namespace occpred {

// Omnidirectional range sensor with rays on a Fibonacci sphere.
struct SensorConfig {
  int rays = 1024;
  double max_range = 3.0;    // metres
  double noise_sigma = 0.0;  // per-ray hit-distance noise, metres
  int period = 2;            // simulation steps between scans
  void Validate() const;
};

nlohmann::json ToJson(const SensorConfig& config);
SensorConfig SensorConfigFromJson(const nlohmann::json& json);

struct ScanResult {
  // One observation per touched cell, sorted by linear index; a cell both hit
  // and traversed in the same scan is reported as a hit.
  std::vector<Observation> observations;
  // Measured (possibly noisy) distance of every ray that returned a hit.
  std::vector<double> hit_distances;
};

// Forward raycasting against the ground truth. A ray hits the first occupied
// cell at distance t (its entry distance); with noise the measured distance is
// t + N(0, sigma^2), the cell containing that point is reported hit and the
// cells entered before it free. Rays whose measured distance exceeds the range
// report free cells up to the range. Throws kInvalidArgument when the pose is
// outside the grid or inside an occupied cell.
ScanResult SimulateScan(const OccupancyGrid& ground_truth, const Eigen::Vector3d& pose, const SensorConfig& config,
                        Rng& rng);

// Same, with precomputed unit ray directions.
ScanResult SimulateScan(const OccupancyGrid& ground_truth, const Eigen::Vector3d& pose, const SensorConfig& config,
                        const std::vector<Eigen::Vector3d>& directions, Rng& rng);

}  // namespace occpred

#endif  // OCCPRED_NAVSIM_SENSOR_H_
