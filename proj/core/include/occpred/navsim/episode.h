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

#ifndef OCCPRED_NAVSIM_EPISODE_H_
#define OCCPRED_NAVSIM_EPISODE_H_

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "occpred/common/rng.h"
#include "occpred/navmap/double_layer_map.h"
#include "occpred/navsim/planner.h"
#include "occpred/navsim/sensor.h"
#include "occpred/navsim/trajectory.h"
#include "occpred/predictor/predictor.h"
#include "occpred/scenegen/scene.h"

namespace occpred {

struct EpisodeConfig {
  double dt = 0.05;  // seconds per step
  SensorConfig sensor;
  PlannerConfig planner;
  LogOddsParams log_odds;
  FusionParams fusion;
  PredictionSchedule prediction;
  void Validate() const;
};

nlohmann::json ToJson(const EpisodeConfig& config);
EpisodeConfig EpisodeConfigFromJson(const nlohmann::json& json);

enum class FailureCause { kNone, kCollision, kTimeout, kStuck };

const char* ToString(FailureCause cause);

struct RobotState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double time = 0.0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct EpisodeResult {
  bool success = false;
  FailureCause failure = FailureCause::kNone;
  double travel_time = 0.0;        // seconds until the episode ended
  double trajectory_length = 0.0;  // integrated executed path length, metres
  int emergency_stops = 0;
  std::int64_t steps = 0;
  std::vector<Eigen::Vector3d> executed_path;  // robot position after every step, start first

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

nlohmann::json ToJson(const EpisodeResult& result, bool include_path = true);

// Counters that depend on the scheme's internals (and so may differ between
// schemes with identical behaviour); kept out of EpisodeResult.
struct EpisodeStats {
  int replans = 0;
  int failed_replans = 0;
  int controlled_stops = 0;
  int prediction_refreshes = 0;
  int prediction_skips = 0;
};

// Deterministic closed-loop simulation of one navigation run. Each Step()
// advances dt: scan (every sensor period) -> original-layer update ->
// prediction schedule (PREDICTED only) -> collision-view refresh -> validity
// check and replanning -> motion along the trajectory -> termination checks.
//
// Replanning starts from a commit point d_c = v^2 / (2 a_max) + v dt ahead on
// the current trajectory, which the robot keeps following until then. When
// the remaining trajectory is blocked before the commit point no replan can
// take effect in time: the robot brakes at a_max along its path and, if it
// was moving, an emergency stop is counted. A block further ahead triggers a
// replan from the commit point, or a plain stop when that fails.
class Episode {
 public:
  // `predictor` is used only by the PREDICTED scheme (required there) and
  // must outlive the episode, as must `scene`.
  Episode(const Scene& scene, const Scheme& scheme, const EpisodeConfig& config, const Predictor* predictor,
          std::uint64_t seed);

  bool done() const { return done_; }
  // No-op once done.
  void Step();

  const RobotState& state() const { return state_; }
  const EpisodeResult& result() const { return result_; }
  const EpisodeStats& stats() const { return stats_; }
  const DoubleLayerMap& map() const { return map_; }
  const Trajectory& trajectory() const { return trajectory_; }
  bool braking() const { return braking_; }

 private:
  void RefreshView();
  void UpdatePlan();
  bool ReplanFromCommit(double s, double v);
  void ReplanFromRest();
  void Brake(double s);
  void Advance();
  bool InCollision(const Eigen::Vector3d& p) const;
  void Finish(bool success, FailureCause cause);

  const Scene& scene_;
  Scheme scheme_;
  EpisodeConfig config_;
  DoubleLayerMap map_;
  std::optional<PredictionScheduler> scheduler_;
  std::vector<Eigen::Vector3d> directions_;
  Rng rng_;
  std::optional<CollisionView> view_;
  std::uint64_t view_original_version_ = 0;
  std::uint64_t view_predicted_version_ = 0;

  Trajectory trajectory_;
  double trajectory_time_ = 0.0;  // time along trajectory_
  double escape_end_ = 0.0;       // arc length of the escape manoeuvre
  bool braking_ = false;
  bool rest_attempted_ = false;
  std::int64_t last_replan_step_ = 0;

  std::int64_t step_ = 0;
  RobotState state_;
  EpisodeResult result_;
  EpisodeStats stats_;
  bool done_ = false;
};

EpisodeResult RunEpisode(const Scene& scene, const Scheme& scheme, const EpisodeConfig& config,
                         const Predictor* predictor, std::uint64_t seed, EpisodeStats* stats = nullptr);

}  // namespace occpred

#endif  // OCCPRED_NAVSIM_EPISODE_H_
