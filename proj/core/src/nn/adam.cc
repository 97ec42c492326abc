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

#include "occpred/nn/adam.h"

#include <cmath>

#include "occpred/common/error.h"

namespace occpred::nn {

double LrSchedule::At(std::int64_t step) const {
  Validate();
  double lr = steps.front().second;
  for (const auto& [start, rate] : steps) {
    if (start <= step) lr = rate;
  }
  return lr;
}

void LrSchedule::Validate() const {
  Require(!steps.empty() && steps.front().first == 0, ErrorCode::kInvalidArgument,
          "lr schedule must start at step 0");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Require(steps[i].second > 0.0, ErrorCode::kInvalidArgument, "lr schedule rates must be > 0");
    Require(i == 0 || steps[i].first > steps[i - 1].first, ErrorCode::kInvalidArgument,
            "lr schedule steps must be strictly increasing");
  }
}

void AdamStep(const std::vector<Tensor*>& params, AdamState& state, double lr) {
  Require(lr > 0.0, ErrorCode::kInvalidArgument, "adam: lr must be > 0");
  if (state.m.empty() && state.v.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(static_cast<std::size_t>(p->numel()), 0.0);
      state.v.emplace_back(static_cast<std::size_t>(p->numel()), 0.0);
    }
  }
  Require(state.m.size() == params.size() && state.v.size() == params.size(), ErrorCode::kInvalidArgument,
          "adam: state has a different parameter count");
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    Require(p.has_grad(), ErrorCode::kInvalidArgument, "adam: parameter without gradient buffer");
    auto& m = state.m[i];
    auto& v = state.v[i];
    Require(m.size() == static_cast<std::size_t>(p.numel()) && v.size() == m.size(), ErrorCode::kInvalidArgument,
            "adam: moment shape differs from parameter " + std::to_string(i));
    auto data = p.data();
    auto grad = p.grad();
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double g = grad[j];
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      data[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + state.eps);
    }
  }
}

}  // namespace occpred::nn
