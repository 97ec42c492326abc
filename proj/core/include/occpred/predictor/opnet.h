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

#ifndef OCCPRED_PREDICTOR_OPNET_H_
#define OCCPRED_PREDICTOR_OPNET_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "occpred/nn/tensor.h"
#include "occpred/nn/weights_io.h"
#include "occpred/predictor/predictor.h"

namespace occpred {

// Occupancy prediction network: a 3D U-Net with a dilated-convolution
// pyramid at the bottleneck.
//
//   enc0.a, enc0.b                      width w0, full resolution (skip 0)
//   down<l>.a (stride 2), down<l>.b     width w0 * 2^l, l = 1..depth (skip l < depth)
//   aspp.b<i> (dilation d_i), aspp.fuse 1x1x1 fusion back to the bottleneck width
//   dec<l>                              upsample x2, concat skip l, conv to width w_l
//   head                                1x1x1 conv to one channel, sigmoid
//
// Every convolution except the head is followed by batch normalization and relu.
struct OPNetConfig {
  int base_width = 6;
  int depth = 2;
  std::vector<int> dilations = {1, 2, 4};
  int aspp_branch_width = 0;  // 0: half the bottleneck width
  GridDims block_dims{40, 40, 20};
  std::uint64_t seed = 7;

  int Width(int level) const { return base_width << level; }
  int BranchWidth() const;
  // Throws kInvalidArgument, e.g. when block dims are not divisible by 2^depth.
  void Validate() const;
};

nlohmann::json ToJson(const OPNetConfig& config);
OPNetConfig OPNetConfigFromJson(const nlohmann::json& json);

// Single-channel input encoding of a trinary block: -1, 0, 1 as reals.
nn::Tensor EncodeBlocks(const std::vector<const TrinaryGrid*>& blocks);

class OPNetModel {
 public:
  // He-normal weights (std sqrt(2 / fan_in)) from the config seed, zero biases.
  static OPNetModel Build(const OPNetConfig& config);
  // Rebuilds the architecture from serialized layers (widths, depth and
  // dilations are recovered from layer ids and specs).
  static OPNetModel FromLayers(std::vector<nn::ConvLayer> layers, const GridDims& block_dims);
  static OPNetModel Load(const std::filesystem::path& path, const GridDims& block_dims);
  void Save(const std::filesystem::path& path) const;

  const OPNetConfig& config() const { return config_; }
  const std::vector<nn::ConvLayer>& layers() const { return layers_; }
  // Trainable scalars: conv weights and biases plus normalization scale/shift.
  std::int64_t ParameterCount() const;

  // Inference with running normalization statistics; thread-safe.
  nn::Tensor Infer(const nn::Tensor& input) const;

  // Training forward pass with batch statistics; keeps activations for Backward.
  nn::Tensor TrainForward(const nn::Tensor& input, bool update_running_stats = true);
  // Accumulates parameter gradients from d loss / d output probabilities and
  // returns d loss / d input. Requires a preceding TrainForward.
  nn::Tensor Backward(const nn::Tensor& grad_probs);

  std::vector<nn::Tensor*> Parameters();
  void ZeroGrad();

 private:
  struct LayerCache {
    nn::Tensor input;
    nn::NormCache norm;
    nn::Tensor output;
  };
  struct Cache {
    std::vector<LayerCache> layers;
    bool valid = false;
  };
  enum class Activation { kRelu, kSigmoid };

  OPNetModel() = default;
  void IndexLayers();
  template <typename Self>
  static nn::Tensor Forward(Self& self, const nn::Tensor& input, Cache* cache);
  template <typename Self>
  static nn::Tensor RunLayer(Self& self, int index, const nn::Tensor& x, Cache* cache);
  nn::Tensor BackLayer(int index, const nn::Tensor& grad_out);
  Activation ActivationOf(int index) const { return index == head_ ? Activation::kSigmoid : Activation::kRelu; }

  OPNetConfig config_;
  std::vector<nn::ConvLayer> layers_;
  int enc_a_ = -1;
  int enc_b_ = -1;
  std::vector<int> down_a_;
  std::vector<int> down_b_;
  std::vector<int> aspp_branches_;
  int aspp_fuse_ = -1;
  std::vector<int> dec_;
  int head_ = -1;
  Cache cache_;
  bool update_running_ = true;
};

class OPNetPredictor final : public Predictor {
 public:
  explicit OPNetPredictor(std::shared_ptr<const OPNetModel> model) : model_(std::move(model)) {}
  std::string name() const override { return "OPNET"; }
  // Throws kInvalidArgument when the block dims differ from the model's.
  OccupancyGrid Predict(const TrinaryGrid& block) const override;

 private:
  std::shared_ptr<const OPNetModel> model_;
};

}  // namespace occpred

#endif  // OCCPRED_PREDICTOR_OPNET_H_
