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

#include "occpred/navsim/sensor.h"

#include <algorithm>
#include <unordered_map>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/voxel/raycast.h"

namespace occpred {

void SensorConfig::Validate() const {
  Require(rays >= 1, ErrorCode::kInvalidArgument, "sensor: rays must be >= 1");
  Require(max_range > 0.0, ErrorCode::kInvalidArgument, "sensor: max_range must be > 0");
  Require(noise_sigma >= 0.0, ErrorCode::kInvalidArgument, "sensor: noise_sigma must be >= 0");
  Require(period >= 1, ErrorCode::kInvalidArgument, "sensor: period must be >= 1");
}

nlohmann::json ToJson(const SensorConfig& c) {
  return {{"rays", c.rays}, {"max_range", c.max_range}, {"noise_sigma", c.noise_sigma}, {"period", c.period}};
}

SensorConfig SensorConfigFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"rays", "max_range", "noise_sigma", "period"}, "sensor");
  SensorConfig c;
  ReadOptional(json, "rays", c.rays);
  ReadOptional(json, "max_range", c.max_range);
  ReadOptional(json, "noise_sigma", c.noise_sigma);
  ReadOptional(json, "period", c.period);
  try {
    c.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return c;
}

ScanResult SimulateScan(const OccupancyGrid& ground_truth, const Eigen::Vector3d& pose, const SensorConfig& config,
                        Rng& rng) {
  return SimulateScan(ground_truth, pose, config, FibonacciSphere(config.rays), rng);
}

ScanResult SimulateScan(const OccupancyGrid& ground_truth, const Eigen::Vector3d& pose, const SensorConfig& config,
                        const std::vector<Eigen::Vector3d>& directions, Rng& rng) {
  config.Validate();
  const GridGeometry& g = ground_truth.geometry();
  Require(g.Contains(pose), ErrorCode::kInvalidArgument, "sensor pose outside the grid");
  Require(ground_truth.at(g.WorldToIndex(pose)) <= kDefaultOccupancyThreshold, ErrorCode::kInvalidArgument,
          "sensor pose is inside an occupied cell");

  // Linear index -> hit flag; hits take precedence over free observations.
  std::unordered_map<std::int64_t, bool> touched;
  auto mark = [&](const GridIndex& c, bool hit) {
    auto [it, inserted] = touched.emplace(g.Linear(c), hit);
    if (!inserted && hit) it->second = true;
  };
  ScanResult result;
  std::vector<GridIndex> path;
  for (const Eigen::Vector3d& dir : directions) {
    path.clear();
    std::optional<GridIndex> hit;
    double hit_t = 0.0;
    TraverseRay(g, pose, dir, config.max_range, [&](const GridIndex& c, double t) {
      if (ground_truth.at(c) > kDefaultOccupancyThreshold) {
        hit = c;
        hit_t = t;
        return false;
      }
      path.push_back(c);
      return true;
    });
    if (!hit) {
      for (const GridIndex& c : path) mark(c, false);
      continue;
    }
    if (config.noise_sigma == 0.0) {
      for (const GridIndex& c : path) mark(c, false);
      mark(*hit, true);
      result.hit_distances.push_back(hit_t);
      continue;
    }
    const double measured = hit_t + config.noise_sigma * rng.Normal();
    if (measured <= 0.0) continue;
    const double limit = std::min(measured, config.max_range);
    std::optional<GridIndex> last;
    std::vector<GridIndex> before;
    const TraversalEnd end = TraverseRay(g, pose, dir, limit + 1e-9, [&](const GridIndex& c, double) {
      if (last) before.push_back(*last);
      last = c;
      return true;
    });
    for (const GridIndex& c : before) mark(c, false);
    if (measured <= config.max_range && last && !end.out_of_bounds) {
      mark(*last, true);
      result.hit_distances.push_back(measured);
    } else if (last) {
      mark(*last, false);
    }
  }
  std::vector<std::pair<std::int64_t, bool>> sorted(touched.begin(), touched.end());
  std::sort(sorted.begin(), sorted.end());
  result.observations.reserve(sorted.size());
  for (const auto& [lin, hit] : sorted) result.observations.push_back({g.Unlinear(lin), hit});
  return result;
}

}  // namespace occpred
