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

#ifndef OCCPRED_NN_CONV3D_H_
#define OCCPRED_NN_CONV3D_H_

#include <string>

#include "occpred/nn/tensor.h"

namespace occpred::nn {

// Cubic 3D convolution hyper-parameters.
struct ConvSpec {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;  // odd
  int stride = 1;
  int dilation = 1;
  int padding = 1;

  // Padding that preserves the spatial size at stride 1.
  static ConvSpec Same(int in, int out, int kernel = 3, int dilation = 1);
  static ConvSpec Strided(int in, int out, int kernel, int stride);

  int OutputSize(int input) const {
    return (input + 2 * padding - dilation * (kernel - 1) - 1) / stride + 1;
  }
  std::int64_t WeightCount() const {
    return static_cast<std::int64_t>(out_channels) * in_channels * kernel * kernel * kernel;
  }
  void Validate() const;
  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

struct LayerParams {
  std::string id;
  Tensor weight;  // (out, in, k, k, k)
  Tensor bias;    // (1, out, 1, 1, 1)
};

LayerParams MakeConvParams(const std::string& id, const ConvSpec& spec);

// Cross-correlation with zero padding. Throws kInvalidArgument on channel or
// parameter shape mismatch or when the output would be empty.
Tensor Conv3dForward(const Tensor& input, const LayerParams& params, const ConvSpec& spec);

struct ConvGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

ConvGrads Conv3dBackward(const Tensor& grad_out, const Tensor& input, const LayerParams& params,
                         const ConvSpec& spec);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_CONV3D_H_
