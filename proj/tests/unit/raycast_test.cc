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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "occpred/common/error.h"
#include "occpred/common/rng.h"
#include "occpred/voxel/raycast.h"
#include "support/oracles.h"

namespace occpred {
namespace {

OccupancyGrid FreeGrid(const GridDims& dims, double res) {
  OccupancyGrid grid(dims, res, Eigen::Vector3d::Zero());
  for (float& v : grid.cells()) v = 0.0f;
  return grid;
}

Eigen::Vector3d RandomDirection(Rng& rng) {
  while (true) {
    const Eigen::Vector3d d(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    if (d.norm() > 0.1 && d.norm() <= 1.0) return d.normalized();
  }
}

TEST(Raycast, FreeGridStopsAtMaxRange) {
  const OccupancyGrid grid = FreeGrid({40, 40, 40}, 0.1);
  const RayResult r = Raycast(grid, {2.0, 2.0, 2.0}, Eigen::Vector3d(1, 1, 0).normalized(), 1.0, RayMode::kForward);
  EXPECT_EQ(r.cause, RayStop::kMaxRange);
  EXPECT_FALSE(r.terminal.has_value());
  EXPECT_DOUBLE_EQ(r.distance, 1.0);
  EXPECT_FALSE(r.visited.empty());
  for (const GridIndex& c : r.visited) EXPECT_EQ(grid.at(c), 0.0f);
}

TEST(Raycast, SingleObstacleAtOneMetre) {
  OccupancyGrid grid = FreeGrid({30, 5, 5}, 0.1);
  grid.set({15, 2, 2}, 1.0f);
  const RayResult r = Raycast(grid, {0.55, 0.25, 0.25}, {1, 0, 0}, 2.5, RayMode::kForward);
  EXPECT_EQ(r.cause, RayStop::kHitOccupied);
  ASSERT_TRUE(r.terminal.has_value());
  EXPECT_EQ(*r.terminal, (GridIndex{15, 2, 2}));
  EXPECT_NEAR(r.distance, 0.95, 1e-12);
  ASSERT_EQ(r.visited.size(), 10u);
  for (std::size_t n = 0; n < r.visited.size(); ++n) EXPECT_EQ(r.visited[n].i, 5 + static_cast<int>(n));
}

TEST(Raycast, ReverseStopsAtUnknownForwardDoesNot) {
  OccupancyGrid grid = FreeGrid({20, 3, 3}, 0.1);
  grid.set({8, 1, 1}, kUnknown);
  const Eigen::Vector3d start(0.05, 0.15, 0.15);
  const RayResult reverse = Raycast(grid, start, {1, 0, 0}, 5.0, RayMode::kReverse);
  EXPECT_EQ(reverse.cause, RayStop::kHitUnknown);
  EXPECT_EQ(*reverse.terminal, (GridIndex{8, 1, 1}));
  const RayResult forward = Raycast(grid, start, {1, 0, 0}, 5.0, RayMode::kForward);
  EXPECT_EQ(forward.cause, RayStop::kOutOfBounds);
  EXPECT_EQ(forward.visited.size(), 20u);
}

TEST(Raycast, RejectsBadArguments) {
  const OccupancyGrid grid = FreeGrid({4, 4, 4}, 0.1);
  EXPECT_THROW(Raycast(grid, {1.0, 0.1, 0.1}, {1, 0, 0}, 1.0, RayMode::kForward), Error);
  EXPECT_THROW(Raycast(grid, {0.1, 0.1, 0.1}, {2, 0, 0}, 1.0, RayMode::kForward), Error);
  EXPECT_THROW(Raycast(grid, {0.1, 0.1, 0.1}, {1, 0, 0}, 0.0, RayMode::kForward), Error);
}

TEST(Raycast, AxisAlignedRayOnCellFaceIsDeterministic) {
  // A ray running exactly along a cell face is a measure-zero tie; the
  // traversal must still be stable and never skip a cell along its axis.
  const OccupancyGrid grid = FreeGrid({10, 4, 4}, 0.1);
  const RayResult r = Raycast(grid, {0.05, 0.2, 0.2}, {1, 0, 0}, 0.55, RayMode::kForward);
  ASSERT_EQ(r.visited.size(), 6u);
  for (std::size_t n = 0; n < r.visited.size(); ++n) EXPECT_EQ(r.visited[n].i, static_cast<int>(n));
}

// Random rays over random grids against the exact slab oracle: same visited
// sequence, terminal cell and cause. A fine-step sampler (resolution / 10)
// must never report a cell before the stop that the traversal missed.
TEST(Raycast, MatchesSlabOracleOnRandomRays) {
  Rng rng(2024);
  int rays = 0;
  for (int g = 0; g < 4; ++g) {
    const GridGeometry geometry({16, 16, 16}, 0.1, Eigen::Vector3d(rng.Uniform(-1, 1), rng.Uniform(-1, 1), 0.0));
    const OccupancyGrid grid = testing::RandomTrinaryGrid(geometry, 0.04, 0.04, rng);
    for (int n = 0; n < 50; ++n, ++rays) {
      const Eigen::Vector3d start = geometry.origin() + Eigen::Vector3d(rng.Uniform(0.01, 1.59),
                                                                        rng.Uniform(0.01, 1.59),
                                                                        rng.Uniform(0.01, 1.59));
      const Eigen::Vector3d dir = RandomDirection(rng);
      const double range = rng.Uniform(0.2, 3.0);
      for (RayMode mode : {RayMode::kForward, RayMode::kReverse}) {
        const RayResult got = Raycast(grid, start, dir, range, mode);
        const testing::OracleRay want = testing::SlabRaycast(grid, start, dir, range, mode);
        ASSERT_EQ(got.cause, want.cause) << "ray " << rays;
        ASSERT_EQ(got.visited, want.visited) << "ray " << rays;
        ASSERT_EQ(got.terminal, want.terminal) << "ray " << rays;
        EXPECT_NEAR(got.distance, want.distance, 1e-9);

        std::set<GridIndex> reported(got.visited.begin(), got.visited.end());
        if (got.terminal) reported.insert(*got.terminal);
        for (const GridIndex& c : testing::SampledCells(geometry, start, dir, got.distance, 0.01)) {
          EXPECT_TRUE(reported.count(c)) << "ray " << rays << " sampled cell " << ToString(c);
        }
      }
    }
  }
}

TEST(FibonacciSphere, UnitVectorsWithZeroMean) {
  const std::vector<Eigen::Vector3d> dirs = FibonacciSphere(1000);
  ASSERT_EQ(dirs.size(), 1000u);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const Eigen::Vector3d& d : dirs) {
    EXPECT_NEAR(d.norm(), 1.0, 1e-12);
    mean += d;
  }
  EXPECT_LT((mean / 1000.0).norm(), 0.01);
}

}  // namespace
}  // namespace occpred
