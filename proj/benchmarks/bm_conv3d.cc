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

// Forward and backward cost of a single 3x3x3 convolution layer on a voxel
// block of the size used for training.

#include <benchmark/benchmark.h>

#include "occpred/common/rng.h"
#include "occpred/nn/conv3d.h"

namespace {

using occpred::nn::ConvSpec;
using occpred::nn::Shape;
using occpred::nn::Tensor;

Tensor RandomTensor(const Shape& shape, std::uint64_t seed) {
  occpred::Rng rng(seed);
  Tensor t(shape);
  for (double& v : t.data()) v = rng.Uniform(-1.0, 1.0);
  return t;
}

void BM_Conv3dForward(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const int size = static_cast<int>(state.range(1));
  const ConvSpec spec = ConvSpec::Same(channels, channels);
  const occpred::nn::LayerParams params = occpred::nn::MakeConvParams("bench", spec);
  const Tensor input = RandomTensor({1, channels, size, size, size}, 1);
  for (auto _ : state) {
    Tensor out = occpred::nn::Conv3dForward(input, params, spec);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * spec.WeightCount() * size * size * size);
}
BENCHMARK(BM_Conv3dForward)->Args({8, 16})->Args({8, 32})->Args({16, 16})->Unit(benchmark::kMillisecond);

void BM_Conv3dBackward(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const int size = static_cast<int>(state.range(1));
  const ConvSpec spec = ConvSpec::Same(channels, channels);
  const occpred::nn::LayerParams params = occpred::nn::MakeConvParams("bench", spec);
  const Tensor input = RandomTensor({1, channels, size, size, size}, 2);
  const Tensor grad_out = RandomTensor({1, channels, size, size, size}, 3);
  for (auto _ : state) {
    occpred::nn::ConvGrads grads = occpred::nn::Conv3dBackward(grad_out, input, params, spec);
    benchmark::DoNotOptimize(grads.weight.data().data());
  }
}
BENCHMARK(BM_Conv3dBackward)->Args({8, 16})->Args({8, 32})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
