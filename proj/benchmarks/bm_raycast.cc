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

// Throughput of single rays and full sensor sweeps through a box field.

#include <benchmark/benchmark.h>

#include <vector>

#include "occpred/scenegen/scene.h"
#include "occpred/voxel/raycast.h"

namespace {

occpred::Scene BenchScene() {
  occpred::SceneSpec spec;
  spec.kind = occpred::SceneKind::kBoxField;
  spec.extents = {10.0, 10.0, 2.0};
  spec.obstacle_count = 12;
  spec.seed = 7;
  return occpred::GenerateScene(spec);
}

void BM_RaycastSweep(benchmark::State& state) {
  const occpred::Scene scene = BenchScene();
  const std::vector<Eigen::Vector3d> dirs = occpred::FibonacciSphere(static_cast<int>(state.range(0)));
  occpred::RayResult result;
  for (auto _ : state) {
    for (const Eigen::Vector3d& d : dirs) {
      occpred::RaycastInto(scene.grid, scene.start, d, 3.0, occpred::RayMode::kForward,
                           occpred::kDefaultOccupancyThreshold, result);
      benchmark::DoNotOptimize(result.distance);
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dirs.size()));
}
BENCHMARK(BM_RaycastSweep)->Arg(256)->Arg(2048);

void BM_TraverseLongRay(benchmark::State& state) {
  const occpred::Scene scene = BenchScene();
  const Eigen::Vector3d dir = Eigen::Vector3d(1.0, 0.37, 0.05).normalized();
  const Eigen::Vector3d start(0.05, 0.05, 0.95);
  for (auto _ : state) {
    int cells = 0;
    occpred::TraverseRay(scene.grid.geometry(), start, dir, 12.0, [&](const occpred::GridIndex&, double) {
      ++cells;
      return true;
    });
    benchmark::DoNotOptimize(cells);
  }
}
BENCHMARK(BM_TraverseLongRay);

}  // namespace

BENCHMARK_MAIN();
