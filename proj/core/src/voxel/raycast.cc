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

#include "occpred/voxel/raycast.h"

#include <numbers>

#include "occpred/common/error.h"

namespace occpred {

const char* ToString(RayStop stop) {
  switch (stop) {
    case RayStop::kHitOccupied: return "HIT_OCCUPIED";
    case RayStop::kHitUnknown: return "HIT_UNKNOWN";
    case RayStop::kMaxRange: return "MAX_RANGE";
    case RayStop::kOutOfBounds: return "OUT_OF_BOUNDS";
  }
  return "?";
}

void RaycastInto(const OccupancyGrid& grid, const Eigen::Vector3d& start, const Eigen::Vector3d& direction,
                 double max_range, RayMode mode, double threshold, RayResult& result) {
  Require(std::abs(direction.norm() - 1.0) < 1e-6, ErrorCode::kInvalidArgument, "ray direction must be unit length");
  Require(max_range > 0.0, ErrorCode::kInvalidArgument, "max_range must be > 0");
  Require(grid.geometry().Contains(start), ErrorCode::kOutOfBounds, "ray start outside grid");

  result.visited.clear();
  result.terminal.reset();
  const bool reverse = mode == RayMode::kReverse;
  std::optional<RayStop> hit;
  const TraversalEnd end =
      TraverseRay(grid.geometry(), start, direction, max_range, [&](const GridIndex& index, double) {
        const float value = grid.at(index);
        if (IsKnown(value) && value > threshold) {
          hit = RayStop::kHitOccupied;
        } else if (reverse && IsUnknown(value)) {
          hit = RayStop::kHitUnknown;
        } else {
          result.visited.push_back(index);
          return true;
        }
        result.terminal = index;
        return false;
      });
  result.distance = end.distance;
  if (hit) {
    result.cause = *hit;
  } else {
    result.cause = end.out_of_bounds ? RayStop::kOutOfBounds : RayStop::kMaxRange;
  }
}

RayResult Raycast(const OccupancyGrid& grid, const Eigen::Vector3d& start, const Eigen::Vector3d& direction,
                  double max_range, RayMode mode, double threshold) {
  RayResult result;
  RaycastInto(grid, start, direction, max_range, mode, threshold, result);
  return result;
}

std::vector<Eigen::Vector3d> FibonacciSphere(int n) {
  Require(n >= 1, ErrorCode::kInvalidArgument, "ray count must be >= 1");
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    dirs.back().normalize();
  }
  return dirs;
}

}  // namespace occpred
