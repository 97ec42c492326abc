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

#include <map>
#include <vector>

#include "occpred/common/error.h"
#include "occpred/common/rng.h"
#include "occpred/navmap/double_layer_map.h"
#include "occpred/predictor/predictor.h"
#include "support/oracles.h"

namespace occpred {
namespace {

const GridGeometry kGeometry({20, 20, 10}, 0.1, Eigen::Vector3d::Zero());

TEST(LogOdds, SingleHitOnUnknownExceedsThreshold) {
  DoubleLayerMap map(kGeometry);
  const Observation hit{{3, 3, 3}, true};
  map.UpdateOriginal(std::span<const Observation>(&hit, 1));
  // p = 1 / (1 + e^-0.85) = 0.7006...
  EXPECT_NEAR(map.original().at({3, 3, 3}), 1.0 / (1.0 + std::exp(-0.85)), 1e-6);
  EXPECT_TRUE(map.QueryOccupied({3, 3, 3}, FusionParams{}));
}

TEST(LogOdds, SymmetricUpdatesReturnToPrior) {
  LogOddsParams params;
  params.l_hit = 0.4;
  params.l_free = -0.4;
  DoubleLayerMap map(kGeometry, params);
  std::vector<Observation> obs;
  for (int n = 0; n < 3; ++n) obs.push_back({{5, 5, 5}, false});
  for (int n = 0; n < 3; ++n) obs.push_back({{5, 5, 5}, true});
  map.UpdateOriginal(obs);
  EXPECT_NEAR(map.original().at({5, 5, 5}), 0.5, 1e-6);
}

TEST(LogOdds, UntouchedCellsStayUnknownAndBoundsAreChecked) {
  DoubleLayerMap map(kGeometry);
  const Observation hit{{1, 1, 1}, true};
  map.UpdateOriginal(std::span<const Observation>(&hit, 1));
  EXPECT_EQ(map.original().CountKnown(), 1);
  const std::vector<Observation> bad = {{{2, 2, 2}, true}, {{20, 0, 0}, true}};
  EXPECT_THROW(map.UpdateOriginal(bad), Error);
  EXPECT_TRUE(IsUnknown(map.original().at({2, 2, 2})));
}

TEST(LogOdds, SaturatesAtBounds) {
  DoubleLayerMap map(kGeometry);
  std::vector<Observation> obs(50, Observation{{4, 4, 4}, true});
  map.UpdateOriginal(obs);
  EXPECT_NEAR(map.original().at({4, 4, 4}), 1.0 / (1.0 + std::exp(-3.5)), 1e-6);
}

TEST(Fusion, ExamplesFromDefinition) {
  FusionParams f;
  EXPECT_NEAR(FusedValue(0.9f, 0.5f, f), 0.82, 1e-6);
  EXPECT_EQ(FusedValue(kUnknown, kUnknown, f), 0.0);
  EXPECT_NEAR(FusedValue(kUnknown, 0.7f, f), 0.7, 1e-6);
}

// Every (y_o, y_p) over {unknown, 0, 0.3, 0.7, 1}, evaluated by hand with
// lambda_o = 0.8, lambda_p = 0.2:
//   both known     -> 0.8 y_o + 0.2 y_p
//   both unknown   -> 0
//   one known      -> the known value
TEST(Fusion, ExhaustiveTwentyFiveEntryTable) {
  const float values[5] = {kUnknown, 0.0f, 0.3f, 0.7f, 1.0f};
  const double table[5][5] = {
      // y_p:  U     0     0.3   0.7   1
      {0.00, 0.00, 0.30, 0.70, 1.00},  // y_o = U
      {0.00, 0.00, 0.06, 0.14, 0.20},  // y_o = 0
      {0.30, 0.24, 0.30, 0.38, 0.44},  // y_o = 0.3
      {0.70, 0.56, 0.62, 0.70, 0.76},  // y_o = 0.7
      {1.00, 0.80, 0.86, 0.94, 1.00},  // y_o = 1
  };
  const FusionParams f;
  for (int o = 0; o < 5; ++o) {
    for (int p = 0; p < 5; ++p) {
      // Cell values are float32, so 0.3f and 0.7f carry ~1e-8 representation error.
      EXPECT_NEAR(FusedValue(values[o], values[p], f), table[o][p], 1e-6) << "o=" << o << " p=" << p;
    }
  }
}

TEST(Fusion, QueryOccupiedCases) {
  DoubleLayerMap map(kGeometry);
  const FusionParams f;
  EXPECT_FALSE(map.QueryOccupied({0, 0, 0}, f));
  const Observation hit{{0, 0, 0}, true};
  std::vector<Observation> hits(10, hit);
  map.UpdateOriginal(hits);
  EXPECT_TRUE(map.QueryOccupied({0, 0, 0}, f));
  EXPECT_THROW(map.Fused({-1, 0, 0}, f), Error);
}

TEST(Fusion, ParamsMustSumToOne) {
  FusionParams f;
  f.lambda_p = 0.3;
  EXPECT_THROW(f.Validate(), Error);
}

TEST(Refresh, AllFreeWritesZeroBlockOnly) {
  DoubleLayerMap map(kGeometry);
  ASSERT_TRUE(RefreshPrediction(map, AllFreePredictor(), {0.5, 0.5, 0.5}, {8, 8, 4}));
  const Region r = CenteredRegion(kGeometry, {0.5, 0.5, 0.5}, {8, 8, 4});
  int written = 0;
  for (std::int64_t l = 0; l < kGeometry.cell_count(); ++l) {
    const GridIndex c = kGeometry.Unlinear(l);
    const bool inside = c.i >= r.offset.i && c.i < r.offset.i + 8 && c.j >= r.offset.j && c.j < r.offset.j + 8 &&
                        c.k >= r.offset.k && c.k < r.offset.k + 4;
    const float v = map.predicted().at(c);
    if (inside) {
      EXPECT_EQ(v, 0.0f);
      ++written;
    } else {
      EXPECT_TRUE(IsUnknown(v));
    }
  }
  EXPECT_EQ(written, 8 * 8 * 4);
}

TEST(Refresh, DisjointBlocksAreBothPopulated) {
  DoubleLayerMap map(kGeometry);
  RefreshPrediction(map, AllOccupiedPredictor(), {0.2, 0.2, 0.2}, {4, 4, 4});
  RefreshPrediction(map, AllOccupiedPredictor(), {1.8, 1.8, 0.8}, {4, 4, 4});
  EXPECT_EQ(map.predicted().CountKnown(), 2 * 64);
  EXPECT_EQ(map.predicted_version(), 2u);
}

TEST(Refresh, FailingPredictorLeavesLayerUntouched) {
  DoubleLayerMap map(kGeometry);
  EXPECT_FALSE(RefreshPrediction(map, FailingPredictor(), {1.0, 1.0, 0.5}, {4, 4, 4}));
  EXPECT_EQ(map.predicted().CountKnown(), 0);
  EXPECT_EQ(map.predicted_version(), 0u);
}

// With the pass-through predictor the predicted block is a copy of the
// discretized original layer at capture time, so every write can be traced
// back to the step at which its snapshot was taken.
TEST(Scheduler, LatencyDelaysWriteBack) {
  for (int latency : {0, 1, 3, 7}) {
    PredictionSchedule schedule;
    schedule.period = 4;
    schedule.latency = latency;
    schedule.block_dims = {20, 20, 10};
    const PassthroughPredictor predictor;
    PredictionScheduler scheduler(schedule, &predictor);
    DoubleLayerMap map(kGeometry);
    std::map<std::int64_t, OccupancyGrid> history;
    Rng rng(static_cast<std::uint64_t>(latency));
    for (std::int64_t step = 0; step < 40; ++step) {
      std::vector<Observation> obs;
      for (int n = 0; n < 20; ++n) {
        obs.push_back({kGeometry.Unlinear(static_cast<std::int64_t>(rng.Below(2000))), rng.Bernoulli(0.5)});
      }
      map.UpdateOriginal(obs);
      history[step] = map.original();
      const std::uint64_t before = map.predicted_version();
      scheduler.Step(step, map, {1.0, 1.0, 0.5});
      const bool wrote = map.predicted_version() != before;
      const std::int64_t capture = step - latency;
      EXPECT_EQ(wrote, capture >= 0 && capture % 4 == 0) << "latency " << latency << " step " << step;
      if (wrote) {
        EXPECT_EQ(map.predicted(), PassthroughPredictor().Predict(Discretize(history[capture])))
            << "latency " << latency << " step " << step;
      }
    }
    EXPECT_EQ(scheduler.skipped(), 0);
  }
}

// With an all-free prediction the fused query reduces to thresholding the
// original layer with unknown treated as free, provided every observed
// occupied cell has p_o > 0.5 / lambda_o. A noiseless sensor guarantees this:
// a cell is either always hit or always traversed, and one hit already gives
// p = 0.70 > 0.625.
TEST(Fusion, AllFreePredictionEqualsAggressiveQuery) {
  Rng rng(3);
  DoubleLayerMap map(kGeometry);
  std::vector<std::uint8_t> solid(static_cast<std::size_t>(kGeometry.cell_count()));
  for (auto& s : solid) s = rng.Bernoulli(0.4) ? 1 : 0;
  std::vector<Observation> obs;
  for (int n = 0; n < 3000; ++n) {
    const auto l = static_cast<std::int64_t>(rng.Below(4000));
    obs.push_back({kGeometry.Unlinear(l), solid[static_cast<std::size_t>(l)] == 1});
  }
  map.UpdateOriginal(obs);
  RefreshPrediction(map, AllFreePredictor(), {1.0, 1.0, 0.5}, {20, 20, 10});
  const FusionParams f;
  for (std::int64_t l = 0; l < kGeometry.cell_count(); ++l) {
    const GridIndex c = kGeometry.Unlinear(l);
    const float y_o = map.original().at(c);
    const bool aggressive = IsKnown(y_o) && y_o > 0.5f;
    EXPECT_EQ(map.QueryOccupied(c, f), aggressive) << ToString(c) << " y_o " << y_o;
  }
}

}  // namespace
}  // namespace occpred
