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

// Cost of inflating a fully known map and planning start to goal across it.

#include <benchmark/benchmark.h>

#include <vector>

#include "occpred/navsim/planner.h"
#include "occpred/scenegen/scene.h"

namespace {

occpred::Scene BenchScene() {
  occpred::SceneSpec spec;
  spec.kind = occpred::SceneKind::kBoxField;
  spec.extents = {10.0, 10.0, 2.0};
  spec.obstacle_count = 12;
  spec.passage_clearance = 0.35;
  spec.seed = 11;
  return occpred::GenerateScene(spec);
}

std::vector<std::uint8_t> Mask(const occpred::OccupancyGrid& grid) {
  std::vector<std::uint8_t> mask(grid.cells().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = grid.cells()[i] > 0.5f ? 1 : 0;
  return mask;
}

void BM_BuildCollisionView(benchmark::State& state) {
  const occpred::Scene scene = BenchScene();
  const std::vector<std::uint8_t> mask = Mask(scene.grid);
  const occpred::PlannerConfig config;
  for (auto _ : state) {
    occpred::CollisionView view(scene.grid.geometry(), mask, config.inflation());
    benchmark::DoNotOptimize(&view);
  }
}
BENCHMARK(BM_BuildCollisionView)->Unit(benchmark::kMillisecond);

void BM_PlanAcrossField(benchmark::State& state) {
  const occpred::Scene scene = BenchScene();
  const occpred::PlannerConfig config;
  const occpred::CollisionView view(scene.grid.geometry(), Mask(scene.grid), config.inflation());
  for (auto _ : state) {
    occpred::Trajectory trajectory = occpred::Plan(view, scene.start, scene.goal, config);
    benchmark::DoNotOptimize(trajectory.duration());
  }
}
BENCHMARK(BM_PlanAcrossField)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
