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

#ifndef OCCPRED_OCCLUSION_OCCLUSION_H_
#define OCCPRED_OCCLUSION_OCCLUSION_H_

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "occpred/common/rng.h"
#include "occpred/voxel/grid.h"

namespace occpred {

struct OcclusionParams {
  int t_max = 100;             // sampling attempts per pair
  double scan_interval = 1.0;  // metres between scan points on a path
  int rays_per_scan = 2048;
  double scan_max_range = 3.0;
  double r_min = 0.25;  // accepted iff r_min < knownRatio < r_max
  double r_max = 0.90;
  double robot_radius = 0.2;  // clearance required along a virtual path
  int path_retries = 200;     // segment draws per sample_virtual_path call
  double threshold = kDefaultOccupancyThreshold;

  void Validate() const;
};

struct NoiseParams {
  double gaussian_sigma = 0.1;
  double pepper_rate = 0.05;  // probability a known cell is resampled uniformly
  std::uint64_t seed = 0;

  void Validate() const;
};

nlohmann::json ToJson(const OcclusionParams& params);
nlohmann::json ToJson(const NoiseParams& params);
// Missing keys keep their defaults; unknown keys and invalid values are
// kConfigError.
OcclusionParams OcclusionParamsFromJson(const nlohmann::json& json);
NoiseParams NoiseParamsFromJson(const nlohmann::json& json);

struct DataPair {
  OccupancyGrid target;   // complete(ish) map
  OccupancyGrid partial;  // occluded observation of the target
  std::string id;  // dataset entry id when loaded from a dataset
  std::string scene_id;
  std::uint64_t seed = 0;
  double known_ratio = 0.0;
  int paths_used = 0;
};

// Scan points at k * interval from `from` (k = 0, 1, ...) strictly before the
// end of the segment, followed by `to` itself.
std::vector<Eigen::Vector3d> ScanPointsAlong(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                                             double interval);

// True when every sample along the segment (spaced <= resolution / 2) keeps
// `radius` of known-free cells around it.
bool SegmentIsClear(const OccupancyGrid& target, const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                    double radius, double threshold);

// Straight collision-free segment between two sampled free cells, returned as
// its scan points. Throws kPathSamplingFailed after params.path_retries draws.
std::vector<Eigen::Vector3d> SampleVirtualPath(const OccupancyGrid& target, const OcclusionParams& params, Rng& rng);

// Reverse raycasting from `scan_point` over the full sphere: traversed cells
// become free (0), the occupied cell that stops a ray becomes occupied (1),
// everything else stays unknown. Throws kInvalidArgument if the scan point is
// outside the grid or occupied.
OccupancyGrid SimulateObservation(const OccupancyGrid& target, const Eigen::Vector3d& scan_point,
                                  const OcclusionParams& params);
OccupancyGrid SimulateObservation(const OccupancyGrid& target, const Eigen::Vector3d& scan_point,
                                  const OcclusionParams& params, std::span<const Eigen::Vector3d> directions);

// First write wins: unknown accum cells take the scan value, known cells keep theirs.
OccupancyGrid FuseMap(const OccupancyGrid& accum, const OccupancyGrid& scan);
void FuseInto(OccupancyGrid& accum, const OccupancyGrid& scan);

// Accept/reject loop over virtual paths. Throws kOcclusionGenerationFailed when
// t_max attempts do not produce a map with r_min < knownRatio < r_max.
DataPair GenerateOccludedMap(const OccupancyGrid& target, const OcclusionParams& params, Rng& rng);

// Unknown cells are untouched; each known cell is resampled uniformly with
// probability pepper_rate, otherwise perturbed by N(0, sigma^2) and clamped.
OccupancyGrid AddNoise(const OccupancyGrid& grid, const NoiseParams& noise, Rng& rng);

}  // namespace occpred

#endif  // OCCPRED_OCCLUSION_OCCLUSION_H_
