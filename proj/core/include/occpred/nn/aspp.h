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

#ifndef OCCPRED_NN_ASPP_H_
#define OCCPRED_NN_ASPP_H_

#include <vector>

#include "occpred/nn/conv3d.h"

namespace occpred::nn {

// Parallel dilated convolutions over a shared input, concatenated along the
// channel axis and fused by a 1x1x1 convolution.
struct AsppBranch {
  ConvSpec spec;
  const LayerParams* params = nullptr;
};

struct AsppFusion {
  ConvSpec spec;
  const LayerParams* params = nullptr;
};

// Throws kInvalidArgument when a branch changes the spatial size, when the
// fusion is not 1x1x1, or when its input channels differ from the branch sum.
Tensor AsppForward(const Tensor& input, const std::vector<AsppBranch>& branches, const AsppFusion& fusion);

// Same-padding branch specs for the given dilations.
std::vector<ConvSpec> AsppBranchSpecs(int in_channels, int branch_channels, const std::vector<int>& dilations);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_ASPP_H_
