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

#ifndef OCCPRED_VOXEL_INFLATE_H_
#define OCCPRED_VOXEL_INFLATE_H_

#include <cstdint>
#include <vector>

#include "occpred/voxel/grid.h"

namespace occpred {

// Integer offsets of every cell whose centre lies within `radius` metres of
// the centre cell (inclusive), for a grid of the given resolution.
std::vector<GridIndex> SphereOffsets(double radius, double resolution);

// Exact squared Euclidean distance, in cell units, from every cell centre to
// the nearest blocked cell centre (separable lower-envelope transform).
// Cells with no blocked cell anywhere get +infinity.
std::vector<double> SquaredDistanceField(const GridGeometry& geometry, const std::vector<std::uint8_t>& blocked);

// Dilates a per-cell blocked mask (1 = blocked) by a ball of `radius`: a cell
// is blocked when a blocked cell centre lies within `radius` of its centre,
// the same inclusive rule as SphereOffsets.
std::vector<std::uint8_t> Dilate(const GridGeometry& geometry, const std::vector<std::uint8_t>& blocked,
                                 double radius);

}  // namespace occpred

#endif  // OCCPRED_VOXEL_INFLATE_H_
