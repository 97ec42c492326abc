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

#include "occpred/nn/weights_io.h"

#include "occpred/common/binary_io.h"
#include "occpred/common/error.h"

namespace occpred::nn {
namespace {

constexpr char kMagic[] = "OPNW";
constexpr std::uint32_t kMaxChannels = 1u << 16;

void PutBlob(ByteWriter& w, std::span<const double> values) {
  for (double v : values) w.F32(static_cast<float>(v));
}

void GetBlob(ByteReader& r, std::span<double> values) {
  for (double& v : values) v = r.F32();
}

void PutVector(ByteWriter& w, const std::vector<double>& values) {
  for (double v : values) w.F32(static_cast<float>(v));
}

}  // namespace

std::vector<std::uint8_t> EncodeWeights(const std::vector<ConvLayer>& layers) {
  ByteWriter w;
  w.Magic(kMagic);
  w.U32(kWeightsVersion);
  w.U32(static_cast<std::uint32_t>(layers.size()));
  for (const ConvLayer& layer : layers) {
    const ConvSpec& s = layer.spec;
    w.String(layer.conv.id);
    for (int v : {s.in_channels, s.out_channels, s.kernel, s.stride, s.dilation, s.padding}) {
      w.U32(static_cast<std::uint32_t>(v));
    }
    PutBlob(w, layer.conv.weight.data());
    PutBlob(w, layer.conv.bias.data());
    w.U8(layer.norm.has_value() ? 1 : 0);
    if (layer.norm) {
      PutBlob(w, layer.norm->gamma.data());
      PutBlob(w, layer.norm->beta.data());
      PutVector(w, layer.norm->running_mean);
      PutVector(w, layer.norm->running_var);
    }
  }
  return w.Take();
}

std::vector<ConvLayer> DecodeWeights(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic(kMagic);
  const std::uint32_t version = r.U32();
  Require(version == kWeightsVersion, ErrorCode::kIoError, "weights: unsupported version " + std::to_string(version));
  const std::uint32_t count = r.U32();
  Require(count <= 4096, ErrorCode::kIoError, "weights: implausible layer count");
  std::vector<ConvLayer> layers;
  for (std::uint32_t i = 0; i < count; ++i) {
    ConvLayer layer;
    const std::string id = r.String();
    std::uint32_t v[6];
    for (auto& x : v) x = r.U32();
    Require(v[0] <= kMaxChannels && v[1] <= kMaxChannels && v[2] <= 64 && v[3] <= 64 && v[4] <= 64 && v[5] <= 64,
            ErrorCode::kIoError, "weights: implausible layer spec for " + id);
    layer.spec = {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                  static_cast<int>(v[3]), static_cast<int>(v[4]), static_cast<int>(v[5])};
    try {
      layer.conv = MakeConvParams(id, layer.spec);
    } catch (const Error& e) {
      Throw(ErrorCode::kIoError, std::string("weights: invalid layer spec: ") + e.what());
    }
    Require(r.remaining() >= static_cast<std::size_t>(layer.spec.WeightCount()) * 4, ErrorCode::kIoError,
            "weights: truncated payload");
    GetBlob(r, layer.conv.weight.data());
    GetBlob(r, layer.conv.bias.data());
    const std::uint8_t has_norm = r.U8();
    Require(has_norm <= 1, ErrorCode::kIoError, "weights: bad norm flag");
    if (has_norm == 1) {
      NormParams norm = MakeNormParams(id + ".norm", layer.spec.out_channels);
      GetBlob(r, norm.gamma.data());
      GetBlob(r, norm.beta.data());
      GetBlob(r, norm.running_mean);
      GetBlob(r, norm.running_var);
      for (double rv : norm.running_var) {
        Require(rv >= 0.0, ErrorCode::kIoError, "weights: negative running variance");
      }
      layer.norm = std::move(norm);
    }
    layers.push_back(std::move(layer));
  }
  Require(r.AtEnd(), ErrorCode::kIoError, "weights: trailing bytes");
  return layers;
}

void WriteWeights(const std::filesystem::path& path, const std::vector<ConvLayer>& layers) {
  WriteFileBytes(path, EncodeWeights(layers));
}

std::vector<ConvLayer> ReadWeights(const std::filesystem::path& path) { return DecodeWeights(ReadFileBytes(path)); }

}  // namespace occpred::nn
