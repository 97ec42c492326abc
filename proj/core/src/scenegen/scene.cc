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

#include "occpred/scenegen/scene.h"

#include <algorithm>
#include <cmath>
#include <deque>

#include "occpred/common/error.h"
#include "occpred/common/rng.h"
#include "occpred/voxel/inflate.h"

namespace occpred {
namespace {

constexpr int kPlacementTries = 50;

struct Box {
  GridIndex lo;  // inclusive
  GridIndex hi;  // exclusive
};

double DistanceToBox(const Eigen::Vector3d& p, const Box& box, double res) {
  Eigen::Vector3d d;
  const int lo[3] = {box.lo.i, box.lo.j, box.lo.k};
  const int hi[3] = {box.hi.i, box.hi.j, box.hi.k};
  for (int a = 0; a < 3; ++a) {
    const double a0 = lo[a] * res;
    const double a1 = hi[a] * res;
    d[a] = std::max({a0 - p[a], 0.0, p[a] - a1});
  }
  return d.norm();
}

Eigen::Vector3d SnapToCenter(const GridGeometry& geometry, const Eigen::Vector3d& p) {
  return geometry.IndexToWorld(geometry.WorldToIndex(p));
}

void FillShell(OccupancyGrid& grid) {
  const GridDims& d = grid.dims();
  auto cells = grid.cells();
  for (int i = 0; i < d.x; ++i) {
    for (int j = 0; j < d.y; ++j) {
      for (int k = 0; k < d.z; ++k) {
        const bool shell = i == 0 || j == 0 || k == 0 || i == d.x - 1 || j == d.y - 1 || k == d.z - 1;
        cells[static_cast<std::size_t>(grid.geometry().Linear({i, j, k}))] = shell ? 1.0f : 0.0f;
      }
    }
  }
}

bool BallIsFree(const OccupancyGrid& grid, const Eigen::Vector3d& center, double radius) {
  const GridIndex c = grid.geometry().WorldToIndex(center);
  for (const auto& o : SphereOffsets(radius, grid.resolution())) {
    const GridIndex q{c.i + o.i, c.j + o.j, c.k + o.k};
    if (!grid.geometry().Contains(q) || grid.at(q) != 0.0f) return false;
  }
  return true;
}

}  // namespace

const char* ToString(SceneKind kind) {
  switch (kind) {
    case SceneKind::kCorridor: return "CORRIDOR";
    case SceneKind::kSquareRoom: return "SQUARE_ROOM";
    case SceneKind::kBoxField: return "BOX_FIELD";
  }
  return "?";
}

SceneKind SceneKindFromString(const std::string& name) {
  if (name == "CORRIDOR") return SceneKind::kCorridor;
  if (name == "SQUARE_ROOM") return SceneKind::kSquareRoom;
  if (name == "BOX_FIELD") return SceneKind::kBoxField;
  Throw(ErrorCode::kInvalidArgument, "unknown scene kind '" + name + "'");
}

GridDims SceneSpec::Dims() const {
  GridDims dims;
  int* out[3] = {&dims.x, &dims.y, &dims.z};
  for (int a = 0; a < 3; ++a) {
    const double cells = extents[a] / resolution;
    const double rounded = std::round(cells);
    Require(std::abs(cells - rounded) < 1e-6, ErrorCode::kInvalidArgument,
            "scene extents must be a whole number of voxels");
    *out[a] = static_cast<int>(rounded);
  }
  return dims;
}

void SceneSpec::Validate() const {
  Require(resolution > 0.0, ErrorCode::kInvalidArgument, "scene resolution must be > 0");
  Require((extents.array() > 0.0).all(), ErrorCode::kInvalidArgument, "scene extents must be > 0");
  const GridDims dims = Dims();
  Require(dims.x >= 3 && dims.y >= 3 && dims.z >= 3, ErrorCode::kInvalidArgument, "scene needs >= 3 voxels per axis");
  Require(dims.count() <= max_cells, ErrorCode::kInvalidArgument, "scene exceeds the cell budget");
  Require(obstacle_count >= 0, ErrorCode::kInvalidArgument, "obstacle_count must be >= 0");
  Require(obstacle_min_size > 0.0 && obstacle_min_size <= obstacle_max_size, ErrorCode::kInvalidArgument,
          "obstacle size range must satisfy 0 < min <= max");
  Require(obstacle_min_height > 0.0 && obstacle_min_height <= obstacle_max_height, ErrorCode::kInvalidArgument,
          "obstacle height range must satisfy 0 < min <= max");
  Require(clearance >= 0.0 && passage_clearance >= 0.0, ErrorCode::kInvalidArgument, "clearances must be >= 0");
  Require(max_retries >= 1, ErrorCode::kInvalidArgument, "max_retries must be >= 1");
}

Scene GenerateScene(const SceneSpec& spec) {
  spec.Validate();
  const GridDims dims = spec.Dims();
  const double res = spec.resolution;
  const Eigen::Vector3d& ext = spec.extents;
  // One shell cell plus half a cell of snapping slack beyond the clearance.
  const double margin = spec.clearance + 1.5 * res;

  for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
    Rng rng(DeriveSeed(spec.seed, static_cast<std::uint64_t>(attempt)));
    Scene scene;
    scene.spec = spec;
    scene.grid = OccupancyGrid(dims, res, Eigen::Vector3d::Zero());
    FillShell(scene.grid);

    auto lateral = [&](double length) {
      return length > 2.0 * margin ? rng.Uniform(margin, length - margin) : 0.5 * length;
    };
    const double z = 0.5 * ext.z();
    Eigen::Vector3d start;
    Eigen::Vector3d goal;
    if (spec.kind == SceneKind::kCorridor) {
      start = {lateral(ext.x()), std::min(margin, 0.5 * ext.y()), z};
      goal = {lateral(ext.x()), std::max(ext.y() - margin, 0.5 * ext.y()), z};
    } else {
      start = {std::min(margin, 0.5 * ext.x()), lateral(ext.y()), z};
      goal = {std::max(ext.x() - margin, 0.5 * ext.x()), lateral(ext.y()), z};
    }
    scene.start = SnapToCenter(scene.grid.geometry(), start);
    scene.goal = SnapToCenter(scene.grid.geometry(), goal);

    auto cells = scene.grid.cells();
    for (int n = 0; n < spec.obstacle_count; ++n) {
      for (int tries = 0; tries < kPlacementTries; ++tries) {
        const int sx = std::max(1, static_cast<int>(std::lround(rng.Uniform(spec.obstacle_min_size, spec.obstacle_max_size) / res)));
        const int sy = std::max(1, static_cast<int>(std::lround(rng.Uniform(spec.obstacle_min_size, spec.obstacle_max_size) / res)));
        int sz = dims.z;
        if (spec.kind == SceneKind::kBoxField) {
          sz = std::max(1, static_cast<int>(std::lround(rng.Uniform(spec.obstacle_min_height, spec.obstacle_max_height) / res)));
          sz = std::min(sz, dims.z);
        }
        const int span_x = dims.x - 2 - sx;
        const int span_y = dims.y - 2 - sy;
        if (span_x < 0 || span_y < 0) continue;
        Box box;
        box.lo = {1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(span_x) + 1)),
                  1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(span_y) + 1)), 0};
        box.hi = {box.lo.i + sx, box.lo.j + sy, sz};
        if (DistanceToBox(scene.start, box, res) < spec.clearance ||
            DistanceToBox(scene.goal, box, res) < spec.clearance) {
          continue;
        }
        for (int i = box.lo.i; i < box.hi.i; ++i) {
          for (int j = box.lo.j; j < box.hi.j; ++j) {
            for (int k = box.lo.k; k < box.hi.k; ++k) {
              cells[static_cast<std::size_t>(scene.grid.geometry().Linear({i, j, k}))] = 1.0f;
            }
          }
        }
        break;
      }
    }

    if (!BallIsFree(scene.grid, scene.start, spec.clearance) || !BallIsFree(scene.grid, scene.goal, spec.clearance)) {
      continue;
    }
    if (!Reachable(scene.grid, scene.start, scene.goal, spec.passage_clearance)) continue;
    return scene;
  }
  Throw(ErrorCode::kGenerationFailed, "could not place a connected start/goal pair");
}

double OccupiedFraction(const OccupancyGrid& grid, double threshold) {
  return static_cast<double>(grid.CountOccupied(threshold)) / static_cast<double>(grid.cell_count());
}

bool Reachable(const OccupancyGrid& grid, const Eigen::Vector3d& from, const Eigen::Vector3d& to, double clearance) {
  const GridGeometry& g = grid.geometry();
  if (!g.Contains(from) || !g.Contains(to)) return false;
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(g.cell_count()), 0);
  const auto cells = grid.cells();
  for (std::size_t n = 0; n < blocked.size(); ++n) blocked[n] = cells[n] != 0.0f ? 1 : 0;
  if (clearance > 0.0) blocked = Dilate(g, blocked, clearance);

  const GridIndex s = g.WorldToIndex(from);
  const GridIndex t = g.WorldToIndex(to);
  if (blocked[static_cast<std::size_t>(g.Linear(s))] || blocked[static_cast<std::size_t>(g.Linear(t))]) return false;
  std::vector<std::uint8_t> seen(blocked.size(), 0);
  std::deque<GridIndex> queue{s};
  seen[static_cast<std::size_t>(g.Linear(s))] = 1;
  static constexpr int kSteps[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (!queue.empty()) {
    const GridIndex c = queue.front();
    queue.pop_front();
    if (c == t) return true;
    for (const auto& st : kSteps) {
      const GridIndex q{c.i + st[0], c.j + st[1], c.k + st[2]};
      if (!g.Contains(q)) continue;
      const auto lin = static_cast<std::size_t>(g.Linear(q));
      if (blocked[lin] || seen[lin]) continue;
      seen[lin] = 1;
      queue.push_back(q);
    }
  }
  return false;
}

}  // namespace occpred
