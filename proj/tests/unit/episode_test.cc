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
#include "occpred/navsim/episode.h"
#include "occpred/predictor/predictor.h"
#include "support/oracles.h"

namespace occpred {
namespace {

// Empty 2 x 12 x 2 m room with a closed shell; start and goal 10 m apart on
// a straight line.
Scene EmptyRoom() {
  Scene scene;
  scene.grid = testing::WalledRoom({20, 120, 20}, 0.1);
  scene.start = {1.0, 1.0, 1.0};
  scene.goal = {1.0, 11.0, 1.0};
  scene.spec.extents = {2.0, 12.0, 2.0};
  return scene;
}

// Same room with a full-height wall across y = 6 m between start and goal.
Scene SealedRoom() {
  Scene scene = EmptyRoom();
  const GridDims& d = scene.grid.dims();
  for (int i = 0; i < d.x; ++i) {
    for (int k = 0; k < d.z; ++k) scene.grid.set({i, 60, k}, 1.0f);
  }
  return scene;
}

// Time for a trapezoidal profile from rest over `length` (ending at rest) to
// first come within `radius` of its end.
double TimeToWithin(double length, double radius, double v, double a) {
  const double total = length / v + v / a;  // cruise reached: length >= v^2 / a
  const double tail = std::sqrt(2.0 * radius / a);  // decelerating over the final `radius`
  return total - tail;
}

TEST(Episode, EmptyRoomTravelTimeMatchesTrapezoidalProfile) {
  const Scene scene = EmptyRoom();
  EpisodeConfig config;
  const EpisodeResult r = RunEpisode(scene, SchemeFromString("AGGRESSIVE"), config, nullptr, 1);
  ASSERT_TRUE(r.success) << ToString(r.failure);
  EXPECT_EQ(r.emergency_stops, 0);
  const double expected = TimeToWithin(10.0, config.planner.goal_radius, config.planner.v_max, config.planner.a_max);
  // The episode ends on the first step boundary inside the goal radius.
  EXPECT_NEAR(r.travel_time, expected, 2.0 * config.dt);
  EXPECT_NEAR(r.trajectory_length, 10.0 - config.planner.goal_radius, 0.15);
  EXPECT_EQ(r.executed_path.size(), static_cast<std::size_t>(r.steps) + 1);
  EXPECT_EQ(r.executed_path.front(), scene.start);
}

TEST(Episode, VelocityAndAccelerationLimitsHoldAlongExecutedPath) {
  const Scene scene = SealedRoom();
  EpisodeConfig config;
  config.planner.timeout = 15.0;
  for (const char* scheme : {"AGGRESSIVE", "CONSERVATIVE"}) {
    const EpisodeResult r = RunEpisode(scene, SchemeFromString(scheme), config, nullptr, 3);
    for (std::size_t n = 1; n < r.executed_path.size(); ++n) {
      const double speed = (r.executed_path[n] - r.executed_path[n - 1]).norm() / config.dt;
      EXPECT_LE(speed, config.planner.v_max + 1e-9) << scheme << " step " << n;
    }
  }
}

TEST(Episode, SealedGoalEndsInTimeoutOrStuckWithoutCollision) {
  const Scene scene = SealedRoom();
  EpisodeConfig config;
  config.planner.timeout = 20.0;
  for (const char* scheme : {"AGGRESSIVE", "CONSERVATIVE"}) {
    const EpisodeResult r = RunEpisode(scene, SchemeFromString(scheme), config, nullptr, 5);
    EXPECT_FALSE(r.success) << scheme;
    EXPECT_TRUE(r.failure == FailureCause::kTimeout || r.failure == FailureCause::kStuck)
        << scheme << ": " << ToString(r.failure);
    for (const Eigen::Vector3d& p : r.executed_path) EXPECT_LT(p.y(), 6.0) << scheme;
  }
}

TEST(Episode, IdenticalSeedsGiveIdenticalResults) {
  const Scene scene = SealedRoom();
  EpisodeConfig config;
  config.sensor.noise_sigma = 0.03;
  config.planner.timeout = 10.0;
  const EpisodeResult a = RunEpisode(scene, SchemeFromString("AGGRESSIVE"), config, nullptr, 42);
  const EpisodeResult b = RunEpisode(scene, SchemeFromString("AGGRESSIVE"), config, nullptr, 42);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
}

// A short sensor range hides the wall until the remaining distance is about
// the stopping distance, forcing emergency stops. Each stop must bring the
// robot to rest within v / a (plus one step of discretisation).
TEST(Episode, EmergencyStopReachesRestWithinBrakingTime) {
  const Scene scene = SealedRoom();
  EpisodeConfig config;
  config.sensor.max_range = 0.5;
  config.sensor.period = 1;
  config.planner.v_max = 0.8;
  config.planner.a_max = 2.0;
  config.planner.timeout = 15.0;
  Episode episode(scene, SchemeFromString("AGGRESSIVE"), config, nullptr, 9);
  int stops_checked = 0;
  int previous_stops = 0;
  while (!episode.done()) {
    const double speed_before = episode.state().velocity.norm();
    episode.Step();
    if (episode.result().emergency_stops > previous_stops) {
      previous_stops = episode.result().emergency_stops;
      const double budget = speed_before / config.planner.a_max + config.dt;
      double elapsed = 0.0;
      while (!episode.done() && episode.state().velocity.norm() > 1e-9) {
        episode.Step();
        elapsed += config.dt;
        ASSERT_LE(elapsed, budget + 1e-9) << "still moving " << elapsed << " s after the stop began";
      }
      ++stops_checked;
    }
  }
  EXPECT_GE(stops_checked, 1);
  EXPECT_NE(episode.result().failure, FailureCause::kCollision);
}

// ALL_FREE predictions fuse to the original layer wherever it is known and to
// free elsewhere, which is exactly the aggressive view.
TEST(Episode, AllFreePredictionMatchesAggressive) {
  const Scene scene = SealedRoom();
  EpisodeConfig config;
  config.planner.timeout = 12.0;
  config.prediction.block_dims = {20, 40, 20};  // must fit the 2 m wide room
  const AllFreePredictor all_free;
  const EpisodeResult aggressive = RunEpisode(scene, SchemeFromString("AGGRESSIVE"), config, nullptr, 17);
  const EpisodeResult predicted = RunEpisode(scene, SchemeFromString("PREDICTED(ALL_FREE)"), config, &all_free, 17);
  EXPECT_EQ(ToJson(aggressive).dump(), ToJson(predicted).dump());
}

TEST(Episode, PredictedSchemeRequiresPredictor) {
  const Scene scene = EmptyRoom();
  try {
    Episode episode(scene, SchemeFromString("PREDICTED(ORACLE)"), EpisodeConfig{}, nullptr, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Episode, ConfigJsonRoundTrip) {
  EpisodeConfig config;
  config.dt = 0.1;
  config.sensor.rays = 512;
  config.planner.v_max = 1.5;
  config.prediction.latency = 3;
  const nlohmann::json json = ToJson(config);
  EXPECT_EQ(ToJson(EpisodeConfigFromJson(json)), json);
}

}  // namespace
}  // namespace occpred
