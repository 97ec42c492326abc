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

#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "occpred/common/error.h"
#include "occpred/common/rng.h"
#include "occpred/voxel/grid.h"
#include "occpred/voxel/grid_io.h"
#include "support/oracles.h"

namespace occpred {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an occpred::Error";
  return ErrorCode::kInvalidArgument;
}

TEST(OccupancyGrid, StartsAllUnknown) {
  OccupancyGrid grid({4, 4, 2}, 0.05, Eigen::Vector3d::Zero());
  EXPECT_EQ(grid.cell_count(), 32);
  EXPECT_EQ(grid.CountKnown(), 0);
  for (float v : grid.cells()) EXPECT_TRUE(IsUnknown(v));
}

TEST(OccupancyGrid, BlockOfFourByFourByTwoMetres) {
  OccupancyGrid grid({80, 80, 40}, 0.05, Eigen::Vector3d::Zero());
  const Eigen::Vector3d extent = grid.geometry().extent();
  EXPECT_NEAR(extent.x(), 4.0, 1e-12);
  EXPECT_NEAR(extent.y(), 4.0, 1e-12);
  EXPECT_NEAR(extent.z(), 2.0, 1e-12);
}

TEST(OccupancyGrid, RejectsDegenerateDims) {
  EXPECT_EQ(CodeOf([] { OccupancyGrid({0, 4, 2}, 0.05, Eigen::Vector3d::Zero()); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { OccupancyGrid({4, 4, 2}, 0.0, Eigen::Vector3d::Zero()); }), ErrorCode::kInvalidArgument);
}

TEST(OccupancyGrid, RejectsOutOfRangeValues) {
  OccupancyGrid grid({2, 2, 2}, 0.1, Eigen::Vector3d::Zero());
  EXPECT_EQ(CodeOf([&] { grid.set({0, 0, 0}, 1.5f); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { grid.set({0, 0, 0}, -0.5f); }), ErrorCode::kInvalidArgument);
  grid.set({0, 0, 0}, kUnknown);
  grid.set({1, 1, 1}, 0.25f);
  EXPECT_FLOAT_EQ(grid.at({1, 1, 1}), 0.25f);
}

TEST(GridGeometry, WorldToIndexFloors) {
  GridGeometry g({10, 10, 10}, 0.05, Eigen::Vector3d::Zero());
  EXPECT_EQ(g.WorldToIndex({0.12, 0.0, 0.26}), (GridIndex{2, 0, 5}));
  EXPECT_EQ(g.WorldToIndex({0.0, 0.0, 0.0}), (GridIndex{0, 0, 0}));
  EXPECT_EQ(CodeOf([&] { g.WorldToIndex({-0.01, 0.0, 0.0}); }), ErrorCode::kOutOfBounds);
}

TEST(GridGeometry, LinearRoundTripIsXMajor) {
  GridGeometry g({3, 4, 5}, 0.1, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(g.Linear({0, 0, 1}), 1);
  EXPECT_EQ(g.Linear({0, 1, 0}), 5);
  EXPECT_EQ(g.Linear({1, 0, 0}), 20);
  for (std::int64_t l = 0; l < g.cell_count(); ++l) EXPECT_EQ(g.Linear(g.Unlinear(l)), l);
  const Eigen::Vector3d c = g.IndexToWorld({1, 2, 3});
  EXPECT_NEAR(c.x(), 1.15, 1e-12);
  EXPECT_NEAR(c.y(), 2.25, 1e-12);
  EXPECT_NEAR(c.z(), 3.35, 1e-12);
}

TEST(Discretize, ThresholdAndSentinel) {
  EXPECT_EQ(DiscretizeValue(0.7f, 0.5), 1);
  EXPECT_EQ(DiscretizeValue(kUnknown, 0.5), -1);
  EXPECT_EQ(DiscretizeValue(0.5f, 0.5), 0);
  EXPECT_EQ(DiscretizeValue(0.0f, 0.5), 0);
}

TEST(Discretize, ToOccupancyRoundTrip) {
  Rng rng(1);
  const OccupancyGrid grid = testing::RandomTrinaryGrid(GridGeometry({5, 6, 7}, 0.1, Eigen::Vector3d::Zero()), 0.3,
                                                        0.3, rng);
  EXPECT_EQ(ToOccupancy(Discretize(grid)), grid);
}

TEST(Block, ExtractThenWriteBackIsIdentity) {
  Rng rng(2);
  OccupancyGrid grid = testing::RandomTrinaryGrid(GridGeometry({8, 9, 10}, 0.1, Eigen::Vector3d::Zero()), 0.2, 0.2, rng);
  const OccupancyGrid before = grid;
  const Region region{{2, 3, 4}, {4, 4, 4}};
  const OccupancyGrid block = ExtractBlock(grid, region);
  EXPECT_NEAR(block.origin().x(), 0.2, 1e-12);
  EXPECT_NEAR(block.origin().z(), 0.4, 1e-12);
  EXPECT_EQ(block.at({0, 0, 0}), grid.at({2, 3, 4}));
  WriteBlock(grid, region, block);
  EXPECT_EQ(grid, before);
}

TEST(Block, FullWindowCopiesWholeGrid) {
  Rng rng(3);
  const OccupancyGrid grid =
      testing::RandomTrinaryGrid(GridGeometry({4, 5, 6}, 0.1, Eigen::Vector3d::Zero()), 0.2, 0.2, rng);
  const OccupancyGrid block = ExtractBlock(grid, {{0, 0, 0}, grid.dims()});
  EXPECT_EQ(block, grid);
}

TEST(Block, ExceedingRegionIsRejected) {
  OccupancyGrid grid({4, 4, 4}, 0.1, Eigen::Vector3d::Zero());
  EXPECT_EQ(CodeOf([&] { ExtractBlock(grid, {{2, 0, 0}, {4, 4, 4}}); }), ErrorCode::kInvalidArgument);
}

TEST(Block, CenteredRegionIsShiftedInside) {
  GridGeometry g({20, 20, 10}, 0.1, Eigen::Vector3d::Zero());
  const Region r = CenteredRegion(g, {0.05, 1.95, 0.5}, {8, 8, 4});
  EXPECT_TRUE(Fits(r, g.dims()));
  EXPECT_EQ(r.offset.i, 0);
  EXPECT_EQ(r.offset.j, 12);
}

TEST(KnownRatio, EdgeCases) {
  OccupancyGrid target({3, 3, 3}, 0.1, Eigen::Vector3d::Zero());
  for (float& v : target.cells()) v = 0.0f;
  OccupancyGrid partial(target.geometry());
  EXPECT_DOUBLE_EQ(KnownRatio(partial, target), 0.0);
  EXPECT_DOUBLE_EQ(KnownRatio(target, target), 1.0);
  OccupancyGrid empty(target.geometry());
  EXPECT_EQ(CodeOf([&] { KnownRatio(partial, empty); }), ErrorCode::kUndefinedRatio);
}

TEST(KnownRatio, MatchesExhaustiveCount) {
  Rng rng(4);
  const GridGeometry g({10, 10, 10}, 0.1, Eigen::Vector3d::Zero());
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid target = testing::RandomTrinaryGrid(g, 0.3, 0.2, rng);
    const OccupancyGrid partial = testing::RandomTrinaryGrid(g, 0.2, 0.5, rng);
    int known_target = 0;
    int known_partial = 0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        for (int k = 0; k < 10; ++k) {
          if (target.at({i, j, k}) >= 0.0f) ++known_target;
          if (partial.at({i, j, k}) >= 0.0f) ++known_partial;
        }
      }
    }
    EXPECT_DOUBLE_EQ(KnownRatio(partial, target), static_cast<double>(known_partial) / known_target);
  }
}

TEST(GridIo, EncodeDecodeRoundTrip) {
  Rng rng(5);
  const OccupancyGrid grid =
      testing::RandomTrinaryGrid(GridGeometry({5, 4, 3}, 0.05, Eigen::Vector3d(-1, 0.5, 2)), 0.3, 0.3, rng);
  EXPECT_EQ(DecodeGrid(EncodeGrid(grid)), grid);
  const auto path = std::filesystem::temp_directory_path() / "occpred_voxel_test.ocgr";
  WriteGrid(path, grid);
  EXPECT_EQ(ReadGrid(path), grid);
  std::filesystem::remove(path);
}

TEST(GridIo, TruncatedPayloadIsAnIoError) {
  OccupancyGrid grid({2, 2, 2}, 0.1, Eigen::Vector3d::Zero());
  std::vector<std::uint8_t> bytes = EncodeGrid(grid);
  bytes.resize(bytes.size() - 3);
  EXPECT_EQ(CodeOf([&] { DecodeGrid(bytes); }), ErrorCode::kIoError);
  bytes = EncodeGrid(grid);
  bytes[0] = 'X';
  EXPECT_EQ(CodeOf([&] { DecodeGrid(bytes); }), ErrorCode::kIoError);
}

TEST(GridIo, PgmSliceEncodesStates) {
  OccupancyGrid grid({2, 2, 1}, 0.1, Eigen::Vector3d::Zero());
  grid.set({0, 0, 0}, 1.0f);
  grid.set({1, 0, 0}, 0.0f);
  const auto path = std::filesystem::temp_directory_path() / "occpred_voxel_test.pgm";
  WritePgmSlice(path, grid, SliceAxis::kZ, 0);
  std::ifstream in(path, std::ios::binary);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_GE(contents.size(), 4u);
  EXPECT_EQ(contents.substr(0, 2), "P5");
  const std::string pixels = contents.substr(contents.size() - 4);
  int counts[3] = {0, 0, 0};
  for (unsigned char c : pixels) {
    if (c == 0) ++counts[0];
    if (c == 128) ++counts[1];
    if (c == 255) ++counts[2];
  }
  EXPECT_EQ(counts[0], 1);
  EXPECT_EQ(counts[1], 2);
  EXPECT_EQ(counts[2], 1);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace occpred
