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

#include "occpred/nn/loss.h"

#include <algorithm>
#include <cmath>

#include "occpred/common/error.h"

namespace occpred::nn {

WeightGrid LossWeights(const TrinaryGrid& target, const TrinaryGrid& partial, const LossWeightParams& params) {
  Require(target.geometry() == partial.geometry(), ErrorCode::kInvalidArgument,
          "loss weights: target and partial geometries differ");
  Require(params.missing >= 0.0 && params.occupied >= 0.0 && params.free >= 0.0, ErrorCode::kInvalidArgument,
          "loss weights must be non-negative");
  WeightGrid w{target.dims(), std::vector<double>(target.cells().size())};
  auto t = target.cells();
  auto p = partial.cells();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0) {
      w.weights[i] = 0.0;
    } else if (p[i] < 0) {
      w.weights[i] = params.missing;
    } else if (t[i] == 1) {
      w.weights[i] = params.occupied;
    } else {
      w.weights[i] = params.free;
    }
  }
  return w;
}

LossResult WeightedBce(std::span<const double> probs, std::span<const std::int8_t> target,
                       std::span<const double> weights) {
  Require(probs.size() == target.size() && probs.size() == weights.size(), ErrorCode::kInvalidArgument,
          "weighted bce: size mismatch");
  LossResult r;
  r.grad.assign(probs.size(), 0.0);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double w = weights[i];
    Require(w >= 0.0, ErrorCode::kInvalidArgument, "weighted bce: negative weight");
    if (w == 0.0) continue;
    Require(target[i] == 0 || target[i] == 1, ErrorCode::kInvalidArgument,
            "weighted bce: positive weight on a target cell that is not 0/1");
    total_weight += w;
  }
  if (total_weight == 0.0) return r;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const double p = std::clamp(probs[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = target[i];
    sum += w * (-y * std::log(p) - (1.0 - y) * std::log(1.0 - p));
    r.grad[i] = w / total_weight * (-y / p + (1.0 - y) / (1.0 - p));
  }
  r.loss = sum / total_weight;
  return r;
}

}  // namespace occpred::nn
