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

#include "occpred/voxel/grid.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "occpred/common/error.h"

namespace occpred {

std::string ToString(const GridIndex& index) {
  std::ostringstream out;
  out << "(" << index.i << ", " << index.j << ", " << index.k << ")";
  return out.str();
}

std::string ToString(const GridDims& dims) {
  std::ostringstream out;
  out << dims.x << "x" << dims.y << "x" << dims.z;
  return out.str();
}

GridGeometry::GridGeometry(GridDims dims, double resolution, const Eigen::Vector3d& origin)
    : dims_(dims), resolution_(resolution), origin_(origin) {
  Require(dims.x >= 1 && dims.y >= 1 && dims.z >= 1, ErrorCode::kInvalidArgument,
          "grid dimensions must be >= 1, got " + ToString(dims));
  Require(std::isfinite(resolution) && resolution > 0.0, ErrorCode::kInvalidArgument,
          "resolution must be > 0");
  Require(origin.allFinite(), ErrorCode::kInvalidArgument, "origin must be finite");
}

Eigen::Vector3d GridGeometry::extent() const {
  return Eigen::Vector3d(dims_.x, dims_.y, dims_.z) * resolution_;
}

bool GridGeometry::Contains(const Eigen::Vector3d& point) const {
  const Eigen::Vector3d hi = max_corner();
  for (int a = 0; a < 3; ++a) {
    if (!(point[a] >= origin_[a] && point[a] < hi[a])) return false;
  }
  return true;
}

GridIndex GridGeometry::Unlinear(std::int64_t linear) const {
  GridIndex index;
  index.k = static_cast<int>(linear % dims_.z);
  linear /= dims_.z;
  index.j = static_cast<int>(linear % dims_.y);
  index.i = static_cast<int>(linear / dims_.y);
  return index;
}

GridIndex GridGeometry::WorldToIndexUnchecked(const Eigen::Vector3d& point) const {
  const Eigen::Vector3d rel = (point - origin_) / resolution_;
  return {static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())),
          static_cast<int>(std::floor(rel.z()))};
}

GridIndex GridGeometry::WorldToIndex(const Eigen::Vector3d& point) const {
  Require(Contains(point), ErrorCode::kOutOfBounds, "point outside grid bounds");
  GridIndex index = WorldToIndexUnchecked(point);
  // Rounding can push a point just below the upper face onto the next cell.
  index.i = std::clamp(index.i, 0, dims_.x - 1);
  index.j = std::clamp(index.j, 0, dims_.y - 1);
  index.k = std::clamp(index.k, 0, dims_.z - 1);
  return index;
}

Eigen::Vector3d GridGeometry::IndexToWorld(const GridIndex& index) const {
  return origin_ + (Eigen::Vector3d(index.i, index.j, index.k) + Eigen::Vector3d::Constant(0.5)) * resolution_;
}

OccupancyGrid::OccupancyGrid(GridDims dims, double resolution, const Eigen::Vector3d& origin)
    : OccupancyGrid(GridGeometry(dims, resolution, origin)) {}

OccupancyGrid::OccupancyGrid(const GridGeometry& geometry)
    : geometry_(geometry), cells_(static_cast<std::size_t>(geometry.cell_count()), kUnknown) {}

void OccupancyGrid::set(const GridIndex& index, float value) {
  if (!geometry_.Contains(index)) Throw(ErrorCode::kOutOfBounds, "cell " + ToString(index) + " outside grid");
  Require(value == kUnknown || (value >= 0.0f && value <= 1.0f), ErrorCode::kInvalidArgument,
          "cell value must be in [0,1] or unknown");
  cells_[static_cast<std::size_t>(geometry_.Linear(index))] = value;
}

std::int64_t OccupancyGrid::CountKnown() const {
  return std::count_if(cells_.begin(), cells_.end(), [](float v) { return IsKnown(v); });
}

std::int64_t OccupancyGrid::CountOccupied(double threshold) const {
  return std::count_if(cells_.begin(), cells_.end(), [threshold](float v) { return IsKnown(v) && v > threshold; });
}

TrinaryGrid::TrinaryGrid(const GridGeometry& geometry)
    : geometry_(geometry), cells_(static_cast<std::size_t>(geometry.cell_count()), -1) {}

void TrinaryGrid::set(const GridIndex& index, std::int8_t value) {
  if (!geometry_.Contains(index)) Throw(ErrorCode::kOutOfBounds, "cell " + ToString(index) + " outside grid");
  Require(value >= -1 && value <= 1, ErrorCode::kInvalidArgument, "trinary value must be -1, 0 or 1");
  cells_[static_cast<std::size_t>(geometry_.Linear(index))] = value;
}

std::int8_t DiscretizeValue(float value, double threshold) {
  if (IsUnknown(value)) return -1;
  return value > threshold ? 1 : 0;
}

TrinaryGrid Discretize(const OccupancyGrid& grid, double threshold) {
  Require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument, "threshold must be in (0,1)");
  TrinaryGrid out(grid.geometry());
  auto src = grid.cells();
  auto dst = out.cells();
  for (std::size_t n = 0; n < src.size(); ++n) dst[n] = DiscretizeValue(src[n], threshold);
  return out;
}

OccupancyGrid ToOccupancy(const TrinaryGrid& grid) {
  OccupancyGrid out(grid.geometry());
  auto src = grid.cells();
  auto dst = out.cells();
  for (std::size_t n = 0; n < src.size(); ++n) dst[n] = src[n] < 0 ? kUnknown : static_cast<float>(src[n]);
  return out;
}

bool Fits(const Region& region, const GridDims& dims) {
  return region.offset.i >= 0 && region.offset.j >= 0 && region.offset.k >= 0 && region.dims.x >= 1 &&
         region.dims.y >= 1 && region.dims.z >= 1 && region.offset.i + region.dims.x <= dims.x &&
         region.offset.j + region.dims.y <= dims.y && region.offset.k + region.dims.z <= dims.z;
}

OccupancyGrid ExtractBlock(const OccupancyGrid& grid, const Region& region) {
  Require(Fits(region, grid.dims()), ErrorCode::kInvalidArgument,
          "region " + ToString(region.offset) + "+" + ToString(region.dims) + " exceeds grid " + ToString(grid.dims()));
  const Eigen::Vector3d origin =
      grid.origin() + Eigen::Vector3d(region.offset.i, region.offset.j, region.offset.k) * grid.resolution();
  OccupancyGrid block(region.dims, grid.resolution(), origin);
  const GridDims& bd = region.dims;
  for (int i = 0; i < bd.x; ++i) {
    for (int j = 0; j < bd.y; ++j) {
      const auto src = grid.geometry().Linear({region.offset.i + i, region.offset.j + j, region.offset.k});
      const auto dst = block.geometry().Linear({i, j, 0});
      std::copy_n(grid.cells().begin() + src, bd.z, block.cells().begin() + dst);
    }
  }
  return block;
}

void WriteBlock(OccupancyGrid& grid, const Region& region, const OccupancyGrid& block) {
  Require(Fits(region, grid.dims()), ErrorCode::kInvalidArgument, "region exceeds grid");
  Require(block.dims() == region.dims, ErrorCode::kInvalidArgument, "block dims differ from region dims");
  const GridDims& bd = region.dims;
  for (int i = 0; i < bd.x; ++i) {
    for (int j = 0; j < bd.y; ++j) {
      const auto dst = grid.geometry().Linear({region.offset.i + i, region.offset.j + j, region.offset.k});
      const auto src = block.geometry().Linear({i, j, 0});
      std::copy_n(block.cells().begin() + src, bd.z, grid.cells().begin() + dst);
    }
  }
}

Region CenteredRegion(const GridGeometry& geometry, const Eigen::Vector3d& center, const GridDims& block_dims) {
  const GridDims& dims = geometry.dims();
  Require(block_dims.x >= 1 && block_dims.y >= 1 && block_dims.z >= 1 && block_dims.x <= dims.x &&
              block_dims.y <= dims.y && block_dims.z <= dims.z,
          ErrorCode::kInvalidArgument, "block " + ToString(block_dims) + " does not fit grid " + ToString(dims));
  const GridIndex c = geometry.WorldToIndexUnchecked(center);
  auto place = [](int c, int n, int total) { return std::clamp(c - n / 2, 0, total - n); };
  return {{place(c.i, block_dims.x, dims.x), place(c.j, block_dims.y, dims.y), place(c.k, block_dims.z, dims.z)},
          block_dims};
}

double KnownRatio(const OccupancyGrid& partial, const OccupancyGrid& target) {
  Require(partial.geometry() == target.geometry(), ErrorCode::kInvalidArgument, "geometry mismatch");
  const std::int64_t denominator = target.CountKnown();
  Require(denominator > 0, ErrorCode::kUndefinedRatio, "target has no known cells");
  return static_cast<double>(partial.CountKnown()) / static_cast<double>(denominator);
}

}  // namespace occpred
