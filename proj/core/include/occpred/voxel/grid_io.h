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

#ifndef OCCPRED_VOXEL_GRID_IO_H_
#define OCCPRED_VOXEL_GRID_IO_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "occpred/voxel/grid.h"

namespace occpred {

// Voxel file layout (little-endian):
//   "OCGR" | u32 version | u32 dims[3] | f64 resolution | f64 origin[3] |
//   f32 cells[Dx*Dy*Dz] in x-major order, -1.0 for unknown.
inline constexpr std::uint32_t kGridFormatVersion = 1;

std::vector<std::uint8_t> EncodeGrid(const OccupancyGrid& grid);
OccupancyGrid DecodeGrid(std::span<const std::uint8_t> bytes);

void WriteGrid(const std::filesystem::path& path, const OccupancyGrid& grid);
OccupancyGrid ReadGrid(const std::filesystem::path& path);

enum class SliceAxis { kX, kY, kZ };

// 8-bit binary PGM of one axis-aligned slice: unknown 128, free 255, occupied 0.
void WritePgmSlice(const std::filesystem::path& path, const OccupancyGrid& grid, SliceAxis axis, int index,
                   double threshold = kDefaultOccupancyThreshold);

// ASCII PLY point list of occupied cell centres.
void WriteOccupiedPly(const std::filesystem::path& path, const OccupancyGrid& grid,
                      double threshold = kDefaultOccupancyThreshold);
void WritePointsPly(const std::filesystem::path& path, std::span<const Eigen::Vector3d> points);

}  // namespace occpred

#endif  // OCCPRED_VOXEL_GRID_IO_H_
