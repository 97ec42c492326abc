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

#ifndef OCCPRED_NN_WEIGHTS_IO_H_
#define OCCPRED_NN_WEIGHTS_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "occpred/nn/conv3d.h"
#include "occpred/nn/layers.h"

namespace occpred::nn {

// A convolution with an optional batch normalization after it; the unit of
// serialization.
struct ConvLayer {
  ConvSpec spec;
  LayerParams conv;
  std::optional<NormParams> norm;
};

// Weights file: magic "OPNW", u32 version, u32 layer count, then per layer:
// id string, ConvSpec as six u32, f32 weight and bias blobs, u8 norm flag and,
// when set, f32 gamma, beta, running mean and running variance. Little-endian.
inline constexpr std::uint32_t kWeightsVersion = 1;

std::vector<std::uint8_t> EncodeWeights(const std::vector<ConvLayer>& layers);
// Throws kIoError on a malformed payload.
std::vector<ConvLayer> DecodeWeights(std::span<const std::uint8_t> bytes);

void WriteWeights(const std::filesystem::path& path, const std::vector<ConvLayer>& layers);
std::vector<ConvLayer> ReadWeights(const std::filesystem::path& path);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_WEIGHTS_IO_H_
