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

#ifndef OCCPRED_VOXEL_RAYCAST_H_
#define OCCPRED_VOXEL_RAYCAST_H_

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "occpred/voxel/grid.h"

namespace occpred {

enum class RayMode {
  kForward,  // stops at occupied cells only
  kReverse,  // also stops at the first unknown cell
};

enum class RayStop { kHitOccupied, kHitUnknown, kMaxRange, kOutOfBounds };

const char* ToString(RayStop stop);

struct TraversalEnd {
  bool stopped = false;        // the visitor returned false
  bool out_of_bounds = false;  // left the grid before max_range
  double distance = 0.0;       // ray parameter where traversal ended
};

// Exact voxel traversal (Amanatides & Woo). Calls visit(index, t_enter) for
// each cell the segment [start, start + max_range * dir) passes through, in
// order, starting with the cell containing `start` (t_enter = 0). Boundary
// crossings are recomputed from the cell index every step, so no error
// accumulates along long rays. `start` must lie inside the grid.
template <typename Visit>
TraversalEnd TraverseRay(const GridGeometry& geometry, const Eigen::Vector3d& start, const Eigen::Vector3d& dir,
                         double max_range, Visit&& visit) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const GridDims& dims = geometry.dims();
  const double res = geometry.resolution();
  const Eigen::Vector3d& origin = geometry.origin();
  const int size[3] = {dims.x, dims.y, dims.z};

  GridIndex cell = geometry.WorldToIndex(start);
  int idx[3] = {cell.i, cell.j, cell.k};
  int step[3];
  double t_next[3];
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_next[a] = ((idx[a] + 1) * res + origin[a] - start[a]) / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_next[a] = (idx[a] * res + origin[a] - start[a]) / dir[a];
    } else {
      step[a] = 0;
      t_next[a] = kInf;
    }
  }

  TraversalEnd end;
  double t_enter = 0.0;
  while (true) {
    if (!visit(GridIndex{idx[0], idx[1], idx[2]}, t_enter)) {
      end.stopped = true;
      end.distance = t_enter;
      return end;
    }
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    t_enter = t_next[axis];
    if (t_enter >= max_range) {
      end.distance = max_range;
      return end;
    }
    idx[axis] += step[axis];
    if (idx[axis] < 0 || idx[axis] >= size[axis]) {
      end.out_of_bounds = true;
      end.distance = t_enter;
      return end;
    }
    const int boundary = step[axis] > 0 ? idx[axis] + 1 : idx[axis];
    t_next[axis] = (boundary * res + origin[axis] - start[axis]) / dir[axis];
  }
}

struct RayResult {
  std::vector<GridIndex> visited;     // cells passed through (never the terminal cell)
  std::optional<GridIndex> terminal;  // set for kHitOccupied / kHitUnknown
  RayStop cause = RayStop::kMaxRange;
  double distance = 0.0;  // entry distance of the terminal cell, or where the ray ended
};

// Casts a ray and classifies each cell: value > threshold terminates with
// kHitOccupied; in kReverse mode an unknown cell terminates with kHitUnknown.
// The start cell is always considered first and may terminate the ray.
// Throws kOutOfBounds if start is outside the grid and kInvalidArgument for a
// non-unit direction or non-positive range.
RayResult Raycast(const OccupancyGrid& grid, const Eigen::Vector3d& start, const Eigen::Vector3d& direction,
                  double max_range, RayMode mode, double threshold = kDefaultOccupancyThreshold);

// Same as Raycast but reuses `result`'s storage.
void RaycastInto(const OccupancyGrid& grid, const Eigen::Vector3d& start, const Eigen::Vector3d& direction,
                 double max_range, RayMode mode, double threshold, RayResult& result);

// n unit vectors spread over the sphere on a Fibonacci lattice.
std::vector<Eigen::Vector3d> FibonacciSphere(int n);

}  // namespace occpred

#endif  // OCCPRED_VOXEL_RAYCAST_H_
