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

#ifndef OCCPRED_VOXEL_GRID_H_
#define OCCPRED_VOXEL_GRID_H_

#include <Eigen/Core>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace occpred {

// Cell value sentinel for never-observed space. Stored values are otherwise in
// [0, 1]; anything negative reads as unknown.
inline constexpr float kUnknown = -1.0f;

inline bool IsUnknown(float value) { return value < 0.0f; }
inline bool IsKnown(float value) { return value >= 0.0f; }

struct GridIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

std::string ToString(const GridIndex& index);

struct GridDims {
  int x = 0;
  int y = 0;
  int z = 0;

  std::int64_t count() const {
    return static_cast<std::int64_t>(x) * static_cast<std::int64_t>(y) * static_cast<std::int64_t>(z);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

std::string ToString(const GridDims& dims);

// Placement of a dense voxel array in the world. Cell (i, j, k) spans
// [origin + (i, j, k) * resolution, origin + (i + 1, j + 1, k + 1) * resolution).
// Storage order is x-major: linear = (i * dims.y + j) * dims.z + k.
class GridGeometry {
 public:
  GridGeometry() = default;
  GridGeometry(GridDims dims, double resolution, const Eigen::Vector3d& origin);

  const GridDims& dims() const { return dims_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector3d& origin() const { return origin_; }
  std::int64_t cell_count() const { return dims_.count(); }
  Eigen::Vector3d extent() const;
  Eigen::Vector3d max_corner() const { return origin_ + extent(); }

  bool Contains(const GridIndex& index) const {
    return index.i >= 0 && index.j >= 0 && index.k >= 0 && index.i < dims_.x && index.j < dims_.y &&
           index.k < dims_.z;
  }
  bool Contains(const Eigen::Vector3d& point) const;

  std::int64_t Linear(const GridIndex& index) const {
    return (static_cast<std::int64_t>(index.i) * dims_.y + index.j) * dims_.z + index.k;
  }
  GridIndex Unlinear(std::int64_t linear) const;

  // Throws kOutOfBounds for points outside the bounding box.
  GridIndex WorldToIndex(const Eigen::Vector3d& point) const;
  // Cell index containing `point`, without bounds checking (may be outside).
  GridIndex WorldToIndexUnchecked(const Eigen::Vector3d& point) const;
  Eigen::Vector3d IndexToWorld(const GridIndex& index) const;  // cell center

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

 private:
  GridDims dims_;
  double resolution_ = 1.0;
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
};

// Dense occupancy grid; every cell starts unknown.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  // Throws kInvalidArgument for a non-positive dimension or resolution.
  OccupancyGrid(GridDims dims, double resolution, const Eigen::Vector3d& origin);
  explicit OccupancyGrid(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }
  const GridDims& dims() const { return geometry_.dims(); }
  double resolution() const { return geometry_.resolution(); }
  const Eigen::Vector3d& origin() const { return geometry_.origin(); }
  std::int64_t cell_count() const { return geometry_.cell_count(); }

  float at(const GridIndex& index) const { return cells_[static_cast<std::size_t>(geometry_.Linear(index))]; }
  // Accepts values in [0, 1] or kUnknown; anything else is kInvalidArgument.
  void set(const GridIndex& index, float value);

  std::span<float> cells() { return cells_; }
  std::span<const float> cells() const { return cells_; }

  std::int64_t CountKnown() const;
  std::int64_t CountOccupied(double threshold) const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  GridGeometry geometry_;
  std::vector<float> cells_;
};

// Cells in {-1, 0, 1}: unknown, free, occupied.
class TrinaryGrid {
 public:
  TrinaryGrid() = default;
  explicit TrinaryGrid(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }
  const GridDims& dims() const { return geometry_.dims(); }

  std::int8_t at(const GridIndex& index) const { return cells_[static_cast<std::size_t>(geometry_.Linear(index))]; }
  void set(const GridIndex& index, std::int8_t value);

  std::span<std::int8_t> cells() { return cells_; }
  std::span<const std::int8_t> cells() const { return cells_; }

  friend bool operator==(const TrinaryGrid&, const TrinaryGrid&) = default;

 private:
  GridGeometry geometry_;
  std::vector<std::int8_t> cells_;
};

inline constexpr double kDefaultOccupancyThreshold = 0.5;

// unknown -> -1, value > threshold -> 1, otherwise 0 (a tie is free).
TrinaryGrid Discretize(const OccupancyGrid& grid, double threshold = kDefaultOccupancyThreshold);
std::int8_t DiscretizeValue(float value, double threshold);

// Reinterprets a trinary grid as occupancy values {kUnknown, 0, 1}.
OccupancyGrid ToOccupancy(const TrinaryGrid& grid);

struct Region {
  GridIndex offset;
  GridDims dims;
};

bool Fits(const Region& region, const GridDims& dims);

// The block's origin is the world corner of region.offset.
OccupancyGrid ExtractBlock(const OccupancyGrid& grid, const Region& region);
void WriteBlock(OccupancyGrid& grid, const Region& region, const OccupancyGrid& block);

// Region of `block_dims` centred on `center`, shifted to lie inside `dims`.
// Throws kInvalidArgument if the block is larger than the grid.
Region CenteredRegion(const GridGeometry& geometry, const Eigen::Vector3d& center, const GridDims& block_dims);

// |known(partial)| / |known(target)|; throws kUndefinedRatio when the target has
// no known cell and kInvalidArgument when geometries differ.
double KnownRatio(const OccupancyGrid& partial, const OccupancyGrid& target);

}  // namespace occpred

#endif  // OCCPRED_VOXEL_GRID_H_
