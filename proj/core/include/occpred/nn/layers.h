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

#ifndef OCCPRED_NN_LAYERS_H_
#define OCCPRED_NN_LAYERS_H_

#include <string>
#include <vector>

#include "occpred/nn/tensor.h"

namespace occpred::nn {

Tensor ReluForward(const Tensor& x);
// Gradient through relu given the forward input (or output; both share sign).
Tensor ReluBackward(const Tensor& grad_out, const Tensor& x);

Tensor SigmoidForward(const Tensor& x);
// Gradient through the sigmoid given its forward output y.
Tensor SigmoidBackward(const Tensor& grad_out, const Tensor& y);

// Nearest-neighbour upsampling by 2 along D, H and W.
Tensor Upsample2xForward(const Tensor& x);
Tensor Upsample2xBackward(const Tensor& grad_out);

// Channel concatenation; all parts must share N, D, H, W.
Tensor ConcatChannels(const std::vector<const Tensor*>& parts);
// Inverse of ConcatChannels: splits x into parts with the given channel counts.
std::vector<Tensor> SplitChannels(const Tensor& x, const std::vector<int>& channels);

// Per-channel batch normalization with learned scale and shift.
struct NormParams {
  std::string id;
  Tensor gamma;  // (1, C, 1, 1, 1)
  Tensor beta;   // (1, C, 1, 1, 1)
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  int channels() const { return gamma.shape().c; }
};

NormParams MakeNormParams(const std::string& id, int channels);

struct NormCache {
  Tensor normalized;  // (x - mean) / sqrt(var + eps)
  std::vector<double> inv_std;
};

// Training mode: batch statistics over N*D*H*W (biased variance). Updates the
// running statistics when `update_running` is set. Throws kNumericDegenerate
// when a channel has a single sample.
Tensor NormForwardTrain(const Tensor& x, NormParams& params, NormCache* cache, bool update_running = true);
// Inference mode: running statistics.
Tensor NormForwardInference(const Tensor& x, const NormParams& params);

struct NormGrads {
  Tensor input;
  Tensor gamma;
  Tensor beta;
};

NormGrads NormBackward(const Tensor& grad_out, const NormParams& params, const NormCache& cache);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_LAYERS_H_
