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

#ifndef OCCPRED_NN_LOSS_H_
#define OCCPRED_NN_LOSS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "occpred/voxel/grid.h"

namespace occpred::nn {

struct LossWeightParams {
  double missing = 3.0;   // known in the target, unknown in the partial map
  double occupied = 3.0;  // occupied in the target and observed
  double free = 1.0;      // everything else that is known in the target
};

// Per-cell loss weights in grid linear order.
struct WeightGrid {
  GridDims dims;
  std::vector<double> weights;
};

// Precedence: target unknown -> 0; partial unknown -> missing; target
// occupied -> occupied; otherwise free. Throws kInvalidArgument when the
// geometries differ or a weight is negative.
WeightGrid LossWeights(const TrinaryGrid& target, const TrinaryGrid& partial, const LossWeightParams& params = {});

inline constexpr double kProbabilityClamp = 1e-7;

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d p, same order as the inputs
};

// Sum of w * BCE(p, y) normalized by the sum of weights, with p clamped to
// [eps, 1 - eps]. Cells with w = 0 are skipped entirely. The gradient is
// evaluated at the clamped probability. Throws kInvalidArgument on a size
// mismatch or a positive weight on an unknown target cell.
LossResult WeightedBce(std::span<const double> probs, std::span<const std::int8_t> target,
                       std::span<const double> weights);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_LOSS_H_
