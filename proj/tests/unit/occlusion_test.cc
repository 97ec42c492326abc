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
#include "occpred/occlusion/occlusion.h"
#include "occpred/scenegen/scene.h"
#include "occpred/voxel/raycast.h"
#include "support/oracles.h"

namespace occpred {
namespace {

OccupancyGrid AllFree(const GridDims& dims, double res) {
  OccupancyGrid grid(dims, res, Eigen::Vector3d::Zero());
  for (float& v : grid.cells()) v = 0.0f;
  return grid;
}

OccupancyGrid BoxFieldBlock(std::uint64_t seed) {
  SceneSpec spec;
  spec.extents = {4.0, 4.0, 2.0};
  spec.obstacle_count = 6;
  spec.seed = seed;
  return GenerateScene(spec).grid;
}

TEST(ScanPoints, OneMetreSpacingPlusEndpoint) {
  const auto pts = ScanPointsAlong({0, 0, 0}, {2.5, 0, 0}, 1.0);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_DOUBLE_EQ(pts[0].x(), 0.0);
  EXPECT_DOUBLE_EQ(pts[1].x(), 1.0);
  EXPECT_DOUBLE_EQ(pts[2].x(), 2.0);
  EXPECT_DOUBLE_EQ(pts[3].x(), 2.5);
  // An exact multiple does not duplicate the endpoint.
  EXPECT_EQ(ScanPointsAlong({0, 0, 0}, {2.0, 0, 0}, 1.0).size(), 3u);
}

TEST(VirtualPath, EmptyRoomSegmentsAreAcceptedAndSpaced) {
  const OccupancyGrid room = testing::WalledRoom({40, 40, 20}, 0.1);
  OcclusionParams params;
  Rng rng(1);
  for (int n = 0; n < 20; ++n) {
    const std::vector<Eigen::Vector3d> pts = SampleVirtualPath(room, params, rng);
    ASSERT_GE(pts.size(), 2u);
    for (std::size_t i = 0; i + 2 < pts.size(); ++i) EXPECT_NEAR((pts[i + 1] - pts[i]).norm(), 1.0, 1e-9);
    EXPECT_LE((pts.back() - pts[pts.size() - 2]).norm(), 1.0 + 1e-9);
    EXPECT_TRUE(SegmentIsClear(room, pts.front(), pts.back(), params.robot_radius, params.threshold));
  }
}

TEST(VirtualPath, SegmentThroughObstacleIsNotClear) {
  OccupancyGrid room = testing::WalledRoom({40, 20, 20}, 0.1);
  for (int j = 0; j < 20; ++j) {
    for (int k = 0; k < 20; ++k) room.set({20, j, k}, 1.0f);
  }
  EXPECT_FALSE(SegmentIsClear(room, {0.5, 1.0, 1.0}, {3.5, 1.0, 1.0}, 0.2, 0.5));
  EXPECT_TRUE(SegmentIsClear(room, {0.5, 1.0, 1.0}, {1.5, 1.0, 1.0}, 0.2, 0.5));
  OcclusionParams params;
  Rng rng(2);
  for (int n = 0; n < 20; ++n) {
    const auto pts = SampleVirtualPath(room, params, rng);
    EXPECT_EQ(pts.front().x() < 2.0, pts.back().x() < 2.0) << "path crosses the dividing wall";
  }
}

TEST(SimulateObservation, FreeSpaceGivesBallOfFreeCells) {
  const OccupancyGrid target = AllFree({40, 40, 30}, 0.1);
  OcclusionParams params;
  params.scan_max_range = 1.0;
  params.rays_per_scan = 4096;
  const Eigen::Vector3d p(2.0, 2.0, 1.5);
  const OccupancyGrid obs = SimulateObservation(target, p, params);
  const double half_diag = 0.1 * std::sqrt(3.0) / 2.0;
  for (std::int64_t l = 0; l < obs.cell_count(); ++l) {
    const GridIndex c = obs.geometry().Unlinear(l);
    const double d = (obs.geometry().IndexToWorld(c) - p).norm();
    const float v = obs.cells()[static_cast<std::size_t>(l)];
    EXPECT_NE(v, 1.0f);
    if (d <= 0.6) EXPECT_EQ(v, 0.0f) << "near cell unobserved at " << d;
    if (d > 1.0 + half_diag) EXPECT_TRUE(IsUnknown(v)) << "cell beyond range observed at " << d;
  }
}

TEST(SimulateObservation, ObstacleShadowsCellsBehindIt) {
  OccupancyGrid target = testing::WalledRoom({40, 12, 12}, 0.1);
  for (int j = 0; j < 12; ++j) {
    for (int k = 0; k < 12; ++k) target.set({15, j, k}, 1.0f);
  }
  OcclusionParams params;
  params.scan_max_range = 5.0;
  const OccupancyGrid obs = SimulateObservation(target, {0.55, 0.6, 0.6}, params);
  int seen_front = 0;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 12; ++j) {
      for (int k = 0; k < 12; ++k) {
        if (i > 15) EXPECT_TRUE(IsUnknown(obs.at({i, j, k})));
        if (i == 15 && obs.at({i, j, k}) == 1.0f) ++seen_front;
      }
    }
  }
  EXPECT_GT(seen_front, 50);
}

TEST(SimulateObservation, SoundAgainstTargetOnRandomScenes) {
  OcclusionParams params;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const OccupancyGrid target = BoxFieldBlock(seed);
    Rng rng(seed);
    const auto pts = SampleVirtualPath(target, params, rng);
    const OccupancyGrid obs = SimulateObservation(target, pts.front(), params);
    EXPECT_GT(obs.CountKnown(), 0);
    for (std::size_t i = 0; i < obs.cells().size(); ++i) {
      const float o = obs.cells()[i];
      if (IsUnknown(o)) continue;
      ASSERT_EQ(o, target.cells()[i] > 0.5f ? 1.0f : 0.0f) << "cell " << i;
    }
  }
}

TEST(SimulateObservation, RejectsOccupiedOrOutsideScanPoint) {
  const OccupancyGrid room = testing::WalledRoom({10, 10, 10}, 0.1);
  OcclusionParams params;
  EXPECT_THROW(SimulateObservation(room, {0.05, 0.05, 0.05}, params), Error);
  EXPECT_THROW(SimulateObservation(room, {2.0, 0.5, 0.5}, params), Error);
}

TEST(FuseMap, IdentityAndNeutralElement) {
  Rng rng(3);
  const GridGeometry g({6, 6, 6}, 0.1, Eigen::Vector3d::Zero());
  const OccupancyGrid a = testing::RandomTrinaryGrid(g, 0.3, 0.3, rng);
  const OccupancyGrid unknown(g);
  EXPECT_EQ(FuseMap(unknown, a), a);
  EXPECT_EQ(FuseMap(a, unknown), a);
  const OccupancyGrid b = testing::RandomTrinaryGrid(g, 0.3, 0.3, rng);
  const OccupancyGrid fused = FuseMap(a, b);
  for (std::size_t i = 0; i < fused.cells().size(); ++i) {
    EXPECT_EQ(fused.cells()[i], IsKnown(a.cells()[i]) ? a.cells()[i] : b.cells()[i]);
  }
}

TEST(FuseMap, NoiselessScansNeverDisagree) {
  const OccupancyGrid target = BoxFieldBlock(5);
  OcclusionParams params;
  Rng rng(5);
  const auto pts = SampleVirtualPath(target, params, rng);
  const OccupancyGrid s1 = SimulateObservation(target, pts.front(), params);
  const OccupancyGrid s2 = SimulateObservation(target, pts.back(), params);
  int both = 0;
  for (std::size_t i = 0; i < s1.cells().size(); ++i) {
    if (IsKnown(s1.cells()[i]) && IsKnown(s2.cells()[i])) {
      ++both;
      ASSERT_EQ(s1.cells()[i], s2.cells()[i]);
    }
  }
  EXPECT_GT(both, 0);
}

TEST(GenerateOccludedMap, AcceptedPairsHaveRatioInBoundsAndSubsetProperty) {
  OcclusionParams params;
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const OccupancyGrid target = BoxFieldBlock(seed);
    Rng rng(seed);
    const DataPair pair = GenerateOccludedMap(target, params, rng);
    EXPECT_GT(pair.known_ratio, 0.25);
    EXPECT_LT(pair.known_ratio, 0.90);
    EXPECT_DOUBLE_EQ(pair.known_ratio, KnownRatio(pair.partial, target));
    for (std::size_t i = 0; i < target.cells().size(); ++i) {
      const float p = pair.partial.cells()[i];
      if (IsUnknown(p)) continue;
      ASSERT_TRUE(IsKnown(target.cells()[i]));
      ASSERT_EQ(p, target.cells()[i] > 0.5f ? 1.0f : 0.0f);
    }
  }
}

TEST(GenerateOccludedMap, DegenerateTargetFails) {
  OccupancyGrid target({10, 10, 10}, 0.1, Eigen::Vector3d::Zero());
  for (float& v : target.cells()) v = 1.0f;
  target.set({5, 5, 5}, 0.0f);
  OcclusionParams params;
  params.t_max = 3;
  params.path_retries = 5;
  Rng rng(1);
  try {
    GenerateOccludedMap(target, params, rng);
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOcclusionGenerationFailed);
  }
}

TEST(AddNoise, ZeroNoiseIsIdentity) {
  Rng rng(4);
  const OccupancyGrid g = testing::RandomTrinaryGrid(GridGeometry({8, 8, 8}, 0.1, Eigen::Vector3d::Zero()), 0.3, 0.3, rng);
  NoiseParams noise;
  noise.gaussian_sigma = 0.0;
  noise.pepper_rate = 0.0;
  EXPECT_EQ(AddNoise(g, noise, rng), g);
}

TEST(AddNoise, FullPepperKeepsUnknownCount) {
  Rng rng(5);
  const OccupancyGrid g = testing::RandomTrinaryGrid(GridGeometry({20, 20, 20}, 0.1, Eigen::Vector3d::Zero()), 0.3, 0.3, rng);
  NoiseParams noise;
  noise.pepper_rate = 1.0;
  const OccupancyGrid out = AddNoise(g, noise, rng);
  EXPECT_EQ(out.CountKnown(), g.CountKnown());
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < g.cells().size(); ++i) {
    if (IsUnknown(g.cells()[i])) {
      EXPECT_TRUE(IsUnknown(out.cells()[i]));
    } else {
      sum += out.cells()[i];
      ++n;
    }
  }
  // Uniform resampling: mean 1/2 with standard error sqrt(1/12 / n).
  EXPECT_NEAR(sum / static_cast<double>(n), 0.5, 3.0 * std::sqrt(1.0 / 12.0 / static_cast<double>(n)));
}

// Monte-Carlo check of both noise components on 10^6 known cells at 0.5
// (far enough from 0 and 1 that clamping is negligible at sigma = 0.1).
TEST(AddNoise, StatisticsMatchNominalRates) {
  const int n = 1000000;
  OccupancyGrid g({100, 100, 100}, 0.1, Eigen::Vector3d::Zero());
  for (float& v : g.cells()) v = 0.5f;
  Rng rng(6);

  NoiseParams pepper_only;
  pepper_only.gaussian_sigma = 0.0;
  pepper_only.pepper_rate = 0.05;
  const OccupancyGrid peppered = AddNoise(g, pepper_only, rng);
  int changed = 0;
  for (float v : peppered.cells()) changed += v != 0.5f ? 1 : 0;
  const double rate = static_cast<double>(changed) / n;
  EXPECT_NEAR(rate, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / n));

  NoiseParams gauss_only;
  gauss_only.gaussian_sigma = 0.1;
  gauss_only.pepper_rate = 0.0;
  const OccupancyGrid perturbed = AddNoise(g, gauss_only, rng);
  double sq = 0.0;
  for (float v : perturbed.cells()) sq += (v - 0.5) * (v - 0.5);
  const double sigma = std::sqrt(sq / n);
  // Standard error of a sample standard deviation: sigma / sqrt(2 n).
  EXPECT_NEAR(sigma, 0.1, 3.0 * 0.1 / std::sqrt(2.0 * n));
}

}  // namespace
}  // namespace occpred
