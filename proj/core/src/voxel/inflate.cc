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

#include "occpred/voxel/inflate.h"

#include <cmath>
#include <limits>

#include "occpred/common/error.h"

namespace occpred {

std::vector<GridIndex> SphereOffsets(double radius, double resolution) {
  Require(radius >= 0.0 && resolution > 0.0, ErrorCode::kInvalidArgument, "bad sphere radius/resolution");
  const int r = static_cast<int>(std::floor(radius / resolution + 1e-9));
  const double r2 = (radius / resolution) * (radius / resolution) + 1e-9;
  std::vector<GridIndex> offsets;
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      for (int k = -r; k <= r; ++k) {
        if (i * i + j * j + k * k <= r2) offsets.push_back({i, j, k});
      }
    }
  }
  return offsets;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional squared distance transform of f over n samples with the
// given stride (lower envelope of parabolas).
void Transform1d(double* f, int n, std::int64_t stride, std::vector<double>& d, std::vector<int>& v,
                 std::vector<double>& z) {
  d.resize(static_cast<std::size_t>(n));
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  auto at = [&](int q) -> double& { return f[q * stride]; };
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (at(q) == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((at(q) + static_cast<double>(q) * q) - (at(p) + static_cast<double>(p) * p)) / (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[static_cast<std::size_t>(k)]) {
      // Only reachable for k == 0: the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) return;  // all infinite: unchanged
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    d[static_cast<std::size_t>(q)] = static_cast<double>(q - p) * (q - p) + at(p);
  }
  for (int q = 0; q < n; ++q) at(q) = d[static_cast<std::size_t>(q)];
}

}  // namespace

std::vector<double> SquaredDistanceField(const GridGeometry& geometry, const std::vector<std::uint8_t>& blocked) {
  Require(static_cast<std::int64_t>(blocked.size()) == geometry.cell_count(), ErrorCode::kInvalidArgument,
          "mask size does not match geometry");
  const GridDims& dims = geometry.dims();
  std::vector<double> f(blocked.size());
  for (std::size_t n = 0; n < blocked.size(); ++n) f[n] = blocked[n] ? 0.0 : kInf;
  std::vector<double> d;
  std::vector<int> v;
  std::vector<double> z;
  const std::int64_t sx = static_cast<std::int64_t>(dims.y) * dims.z;
  const std::int64_t sy = dims.z;
  // z lines (contiguous), then y lines, then x lines.
  for (int i = 0; i < dims.x; ++i) {
    for (int j = 0; j < dims.y; ++j) Transform1d(f.data() + i * sx + j * sy, dims.z, 1, d, v, z);
  }
  for (int i = 0; i < dims.x; ++i) {
    for (int k = 0; k < dims.z; ++k) Transform1d(f.data() + i * sx + k, dims.y, sy, d, v, z);
  }
  for (int j = 0; j < dims.y; ++j) {
    for (int k = 0; k < dims.z; ++k) Transform1d(f.data() + j * sy + k, dims.x, sx, d, v, z);
  }
  return f;
}

std::vector<std::uint8_t> Dilate(const GridGeometry& geometry, const std::vector<std::uint8_t>& blocked,
                                 double radius) {
  Require(radius >= 0.0, ErrorCode::kInvalidArgument, "dilation radius must be >= 0");
  const std::vector<double> field = SquaredDistanceField(geometry, blocked);
  const double r = radius / geometry.resolution();
  const double r2 = r * r + 1e-9;
  std::vector<std::uint8_t> out(blocked.size(), 0);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = field[n] <= r2 ? 1 : 0;
  return out;
}

}  // namespace occpred
