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

#include "occpred/voxel/grid_io.h"

#include <sstream>

#include "occpred/common/binary_io.h"
#include "occpred/common/error.h"

namespace occpred {

std::vector<std::uint8_t> EncodeGrid(const OccupancyGrid& grid) {
  ByteWriter out;
  out.Magic("OCGR");
  out.U32(kGridFormatVersion);
  out.U32(static_cast<std::uint32_t>(grid.dims().x));
  out.U32(static_cast<std::uint32_t>(grid.dims().y));
  out.U32(static_cast<std::uint32_t>(grid.dims().z));
  out.F64(grid.resolution());
  for (int a = 0; a < 3; ++a) out.F64(grid.origin()[a]);
  for (float v : grid.cells()) out.F32(IsUnknown(v) ? kUnknown : v);
  return out.Take();
}

OccupancyGrid DecodeGrid(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.ExpectMagic("OCGR");
  const std::uint32_t version = in.U32();
  Require(version == kGridFormatVersion, ErrorCode::kIoError, "unsupported voxel file version");
  GridDims dims;
  dims.x = static_cast<int>(in.U32());
  dims.y = static_cast<int>(in.U32());
  dims.z = static_cast<int>(in.U32());
  const double resolution = in.F64();
  Eigen::Vector3d origin;
  for (int a = 0; a < 3; ++a) origin[a] = in.F64();
  Require(dims.x > 0 && dims.y > 0 && dims.z > 0 && resolution > 0.0, ErrorCode::kIoError, "bad voxel header");
  Require(in.remaining() == static_cast<std::size_t>(dims.count()) * 4, ErrorCode::kIoError,
          "voxel payload size mismatch");
  OccupancyGrid grid(dims, resolution, origin);
  for (float& v : grid.cells()) {
    const float value = in.F32();
    Require(value == kUnknown || (value >= 0.0f && value <= 1.0f), ErrorCode::kIoError, "voxel value out of range");
    v = value;
  }
  return grid;
}

void WriteGrid(const std::filesystem::path& path, const OccupancyGrid& grid) {
  WriteFileBytes(path, EncodeGrid(grid));
}

OccupancyGrid ReadGrid(const std::filesystem::path& path) { return DecodeGrid(ReadFileBytes(path)); }

void WritePgmSlice(const std::filesystem::path& path, const OccupancyGrid& grid, SliceAxis axis, int index,
                   double threshold) {
  const GridDims& d = grid.dims();
  int width = 0;
  int height = 0;
  int limit = 0;
  switch (axis) {
    case SliceAxis::kX: width = d.y; height = d.z; limit = d.x; break;
    case SliceAxis::kY: width = d.x; height = d.z; limit = d.y; break;
    case SliceAxis::kZ: width = d.x; height = d.y; limit = d.z; break;
  }
  Require(index >= 0 && index < limit, ErrorCode::kInvalidArgument, "slice index out of range");
  std::ostringstream header;
  header << "P5\n" << width << " " << height << "\n255\n";
  std::string data = header.str();
  // Rows top-down so the image shows the second axis increasing upwards.
  for (int row = height - 1; row >= 0; --row) {
    for (int col = 0; col < width; ++col) {
      GridIndex c;
      switch (axis) {
        case SliceAxis::kX: c = {index, col, row}; break;
        case SliceAxis::kY: c = {col, index, row}; break;
        case SliceAxis::kZ: c = {col, row, index}; break;
      }
      const float v = grid.at(c);
      const unsigned char pixel = IsUnknown(v) ? 128 : (v > threshold ? 0 : 255);
      data.push_back(static_cast<char>(pixel));
    }
  }
  WriteFileText(path, data);
}

void WritePointsPly(const std::filesystem::path& path, std::span<const Eigen::Vector3d> points) {
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  for (const auto& p : points) out << p.x() << " " << p.y() << " " << p.z() << "\n";
  WriteFileText(path, out.str());
}

void WriteOccupiedPly(const std::filesystem::path& path, const OccupancyGrid& grid, double threshold) {
  std::vector<Eigen::Vector3d> points;
  const auto cells = grid.cells();
  for (std::int64_t n = 0; n < grid.cell_count(); ++n) {
    const float v = cells[static_cast<std::size_t>(n)];
    if (IsKnown(v) && v > threshold) points.push_back(grid.geometry().IndexToWorld(grid.geometry().Unlinear(n)));
  }
  WritePointsPly(path, points);
}

}  // namespace occpred
