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

#include "occpred/nn/aspp.h"

#include "occpred/common/error.h"
#include "occpred/nn/layers.h"

namespace occpred::nn {

Tensor AsppForward(const Tensor& input, const std::vector<AsppBranch>& branches, const AsppFusion& fusion) {
  Require(!branches.empty(), ErrorCode::kInvalidArgument, "aspp: no branches");
  Require(fusion.params != nullptr && fusion.spec.kernel == 1, ErrorCode::kInvalidArgument,
          "aspp: fusion must be a 1x1x1 convolution");
  const Shape& in = input.shape();
  std::vector<Tensor> outputs;
  outputs.reserve(branches.size());
  for (const AsppBranch& b : branches) {
    Require(b.params != nullptr, ErrorCode::kInvalidArgument, "aspp: missing branch parameters");
    Tensor y = Conv3dForward(input, *b.params, b.spec);
    const Shape& s = y.shape();
    Require(s.d == in.d && s.h == in.h && s.w == in.w, ErrorCode::kInvalidArgument,
            "aspp: branch " + b.params->id + " output " + ToString(s) + " does not preserve input " + ToString(in));
    outputs.push_back(std::move(y));
  }
  std::vector<const Tensor*> parts;
  for (const Tensor& t : outputs) parts.push_back(&t);
  return Conv3dForward(ConcatChannels(parts), *fusion.params, fusion.spec);
}

std::vector<ConvSpec> AsppBranchSpecs(int in_channels, int branch_channels, const std::vector<int>& dilations) {
  std::vector<ConvSpec> specs;
  for (int d : dilations) specs.push_back(ConvSpec::Same(in_channels, branch_channels, 3, d));
  return specs;
}

}  // namespace occpred::nn
