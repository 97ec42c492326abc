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

#ifndef OCCPRED_NN_ADAM_H_
#define OCCPRED_NN_ADAM_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "occpred/nn/tensor.h"

namespace occpred::nn {

// Piecewise-constant learning rate over optimizer steps: the rate of the last
// entry whose start step is <= the current step applies.
struct LrSchedule {
  std::vector<std::pair<std::int64_t, double>> steps = {{0, 1e-4}, {20, 1e-3}};

  double At(std::int64_t step) const;
  void Validate() const;
};

struct AdamState {
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// One bias-corrected update of every parameter from its gradient buffer.
// Moments are allocated on the first call; afterwards their shapes must
// match the parameters (kInvalidArgument otherwise).
void AdamStep(const std::vector<Tensor*>& params, AdamState& state, double lr);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_ADAM_H_
