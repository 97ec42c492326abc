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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "occpred/common/error.h"
#include "occpred/common/rng.h"
#include "occpred/navsim/sensor.h"
#include "support/oracles.h"

namespace occpred {
namespace {

TEST(Sensor, EmptySceneHasNoHits) {
  OccupancyGrid grid({60, 60, 60}, 0.1, Eigen::Vector3d::Zero());
  for (float& v : grid.cells()) v = 0.0f;
  SensorConfig config;
  config.max_range = 2.0;
  Rng rng(1);
  const ScanResult scan = SimulateScan(grid, {3.0, 3.0, 3.0}, config, rng);
  EXPECT_TRUE(scan.hit_distances.empty());
  EXPECT_FALSE(scan.observations.empty());
  for (const Observation& o : scan.observations) EXPECT_FALSE(o.hit);
}

TEST(Sensor, NoiselessScanIsConsistentWithGroundTruth) {
  OccupancyGrid grid = testing::WalledRoom({40, 40, 20}, 0.1);
  for (int k = 0; k < 12; ++k) {
    for (int j = 15; j < 25; ++j) grid.set({25, j, k}, 1.0f);
  }
  SensorConfig config;
  Rng rng(2);
  const ScanResult scan = SimulateScan(grid, {1.0, 2.0, 1.0}, config, rng);
  int hits = 0;
  for (std::size_t n = 0; n < scan.observations.size(); ++n) {
    const Observation& o = scan.observations[n];
    EXPECT_EQ(o.hit, grid.at(o.index) == 1.0f) << ToString(o.index);
    if (n > 0) EXPECT_LT(grid.geometry().Linear(scan.observations[n - 1].index), grid.geometry().Linear(o.index));
    hits += o.hit ? 1 : 0;
  }
  EXPECT_GT(hits, 100);
}

// 10^5 identical rays at a wall 1.05 m away: the measured distances are the
// true entry distance plus independent N(0, sigma^2) noise. The wall stands
// well inside the room so noisy endpoints stay in the grid.
TEST(Sensor, HitNoiseStandardDeviationMatchesSigma) {
  OccupancyGrid grid = testing::WalledRoom({40, 20, 20}, 0.1);
  for (int j = 0; j < 20; ++j) {
    for (int k = 0; k < 20; ++k) grid.set({30, j, k}, 1.0f);
  }
  SensorConfig config;
  config.noise_sigma = 0.05;
  config.max_range = 3.0;
  const std::vector<Eigen::Vector3d> dirs(100000, Eigen::Vector3d::UnitX());
  Rng rng(3);
  const Eigen::Vector3d pose(1.95, 1.05, 1.05);
  const ScanResult scan = SimulateScan(grid, pose, config, dirs, rng);
  ASSERT_EQ(scan.hit_distances.size(), dirs.size());
  double sum = 0.0;
  for (double d : scan.hit_distances) sum += d;
  const double mean = sum / static_cast<double>(dirs.size());
  double sq = 0.0;
  for (double d : scan.hit_distances) sq += (d - mean) * (d - mean);
  const double std = std::sqrt(sq / static_cast<double>(dirs.size() - 1));
  EXPECT_NEAR(std, 0.05, 0.05 * 0.05);
  EXPECT_NEAR(mean, 1.05, 0.001);
}

TEST(Sensor, RejectsPoseInsideObstacleOrOutside) {
  const OccupancyGrid grid = testing::WalledRoom({10, 10, 10}, 0.1);
  SensorConfig config;
  Rng rng(4);
  EXPECT_THROW(SimulateScan(grid, {0.05, 0.5, 0.5}, config, rng), Error);
  EXPECT_THROW(SimulateScan(grid, {5.0, 0.5, 0.5}, config, rng), Error);
}

}  // namespace
}  // namespace occpred
