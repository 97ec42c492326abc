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

#include "occpred/navsim/episode.h"

#include <algorithm>
#include <cmath>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/voxel/raycast.h"

namespace occpred {
namespace {

// Vertices of a trajectory, start first.
std::vector<Eigen::Vector3d> Vertices(const Trajectory& trajectory) {
  std::vector<Eigen::Vector3d> pts;
  if (trajectory.empty()) return pts;
  pts.push_back(trajectory.start());
  for (const TrajectorySegment& seg : trajectory.segments()) pts.push_back(seg.to());
  return pts;
}

bool IsPlanningFailure(const Error& e) {
  return e.code() == ErrorCode::kPlanFailed || e.code() == ErrorCode::kInvalidStart;
}

}  // namespace

void EpisodeConfig::Validate() const {
  Require(dt > 0.0, ErrorCode::kInvalidArgument, "episode: dt must be > 0");
  sensor.Validate();
  planner.Validate();
  log_odds.Validate();
  fusion.Validate();
  prediction.Validate();
}

nlohmann::json ToJson(const EpisodeConfig& c) {
  return {{"dt", c.dt},
          {"sensor", ToJson(c.sensor)},
          {"planner", ToJson(c.planner)},
          {"log_odds", ToJson(c.log_odds)},
          {"fusion", ToJson(c.fusion)},
          {"prediction", ToJson(c.prediction)}};
}

EpisodeConfig EpisodeConfigFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"dt", "sensor", "planner", "log_odds", "fusion", "prediction"}, "episode");
  EpisodeConfig c;
  ReadOptional(json, "dt", c.dt);
  if (json.contains("sensor")) c.sensor = SensorConfigFromJson(json.at("sensor"));
  if (json.contains("planner")) c.planner = PlannerConfigFromJson(json.at("planner"));
  if (json.contains("log_odds")) c.log_odds = LogOddsParamsFromJson(json.at("log_odds"));
  if (json.contains("fusion")) c.fusion = FusionParamsFromJson(json.at("fusion"));
  if (json.contains("prediction")) c.prediction = PredictionScheduleFromJson(json.at("prediction"));
  try {
    c.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return c;
}

const char* ToString(FailureCause cause) {
  switch (cause) {
    case FailureCause::kNone:
      return "NONE";
    case FailureCause::kCollision:
      return "COLLISION";
    case FailureCause::kTimeout:
      return "TIMEOUT";
    case FailureCause::kStuck:
      return "STUCK";
  }
  return "?";
}

nlohmann::json ToJson(const EpisodeResult& r, bool include_path) {
  nlohmann::json out = {{"success", r.success},
                        {"failure", ToString(r.failure)},
                        {"travel_time", r.travel_time},
                        {"trajectory_length", r.trajectory_length},
                        {"emergency_stops", r.emergency_stops},
                        {"steps", r.steps}};
  if (include_path) {
    nlohmann::json path = nlohmann::json::array();
    for (const Eigen::Vector3d& p : r.executed_path) path.push_back(ToJson(p));
    out["executed_path"] = std::move(path);
  }
  return out;
}

Episode::Episode(const Scene& scene, const Scheme& scheme, const EpisodeConfig& config, const Predictor* predictor,
                 std::uint64_t seed)
    : scene_(scene),
      scheme_(scheme),
      config_(config),
      map_(scene.grid.geometry(), config.log_odds),
      directions_(FibonacciSphere(config.sensor.rays)),
      rng_(seed) {
  config_.Validate();
  if (scheme_.kind == SchemeKind::kPredicted) {
    Require(predictor != nullptr, ErrorCode::kInvalidArgument, "PREDICTED scheme needs a predictor");
    scheduler_.emplace(config_.prediction, predictor, config_.fusion);
  }
  const GridGeometry& g = scene.grid.geometry();
  Require(g.Contains(scene.start) && g.Contains(scene.goal), ErrorCode::kInvalidArgument,
          "episode: start and goal must lie inside the scene");
  state_.position = scene.start;
  result_.executed_path.push_back(scene.start);
}

void Episode::RefreshView() {
  if (view_ && map_.original_version() == view_original_version_ &&
      map_.predicted_version() == view_predicted_version_) {
    return;
  }
  view_.emplace(map_.geometry(), SchemeBlockedMask(map_, scheme_.kind, config_.fusion), config_.planner.inflation());
  view_original_version_ = map_.original_version();
  view_predicted_version_ = map_.predicted_version();
}

void Episode::Brake(double s) {
  trajectory_ = trajectory_.BrakeFrom(s);
  trajectory_time_ = 0.0;
  escape_end_ = 0.0;
  braking_ = true;
}

void Episode::ReplanFromRest() {
  last_replan_step_ = step_;
  rest_attempted_ = true;
  ++stats_.replans;
  try {
    const LocalPlan plan =
        PlanTowardGoal(*view_, state_.position, scene_.goal, config_.planner, StartPolicy::kEscape);
    trajectory_ = Trajectory::FromPath(plan.path, 0.0, config_.planner.v_max, config_.planner.a_max);
    escape_end_ = plan.escape_length;
    rest_attempted_ = false;
  } catch (const Error& e) {
    if (!IsPlanningFailure(e)) throw;
    ++stats_.failed_replans;
    trajectory_ = Trajectory(config_.planner.v_max, config_.planner.a_max);
    escape_end_ = 0.0;
  }
  trajectory_time_ = 0.0;
}

bool Episode::ReplanFromCommit(double s, double v) {
  const PlannerConfig& pc = config_.planner;
  last_replan_step_ = step_;
  ++stats_.replans;
  const double commit = std::min(trajectory_.length(), s + v * v / (2.0 * pc.a_max) + v * config_.dt);
  const Eigen::Vector3d p_commit = trajectory_.PointAtDistance(commit);
  LocalPlan plan;
  try {
    plan = PlanTowardGoal(*view_, p_commit, scene_.goal, pc, StartPolicy::kStrict);
  } catch (const Error& e) {
    if (!IsPlanningFailure(e)) throw;
    ++stats_.failed_replans;
    return false;
  }
  // The junction at the commit point is a corner between the kept prefix and
  // the new path; cap its speed like any other corner.
  const Trajectory prefix_path = trajectory_.Slice(s, commit);
  double v_junction = trajectory_.SpeedAtDistance(commit);
  if (!prefix_path.empty() && plan.path.size() >= 2) {
    const Eigen::Vector3d out = (plan.path[1] - plan.path[0]).normalized();
    const double cos_turn = trajectory_.DirectionAtDistance(commit).dot(out);
    v_junction = std::min(v_junction, pc.v_max * std::max(0.1, 0.5 * (1.0 + cos_turn)));
  }
  Trajectory next(pc.v_max, pc.a_max);
  if (!prefix_path.empty()) next = Trajectory::FromPath(Vertices(prefix_path), v, pc.v_max, pc.a_max, v_junction);
  next.Append(Trajectory::FromPath(plan.path, v_junction, pc.v_max, pc.a_max));
  trajectory_ = std::move(next);
  trajectory_time_ = 0.0;
  escape_end_ = 0.0;
  return true;
}

void Episode::UpdatePlan() {
  const bool finished = trajectory_.empty() || trajectory_time_ >= trajectory_.duration();
  if (braking_) {
    if (!finished) return;
    braking_ = false;
  }
  if (finished) {
    if (!rest_attempted_ || step_ - last_replan_step_ >= config_.planner.replan_period) ReplanFromRest();
    return;
  }
  const double s = trajectory_.DistanceAtTime(trajectory_time_);
  const double v = trajectory_.SpeedAtDistance(s);
  const double a = config_.planner.a_max;
  const std::optional<double> blocked = view_->FirstBlocked(trajectory_, std::max(s, escape_end_));
  if (blocked) {
    const double commit = v * v / (2.0 * a) + v * config_.dt;
    if (*blocked <= s + commit) {
      if (v > 0.0) {
        ++result_.emergency_stops;
        Brake(s);
      } else {
        ReplanFromRest();
      }
      return;
    }
    if (!ReplanFromCommit(s, v)) {
      ++stats_.controlled_stops;
      Brake(s);
    }
    return;
  }
  if (step_ - last_replan_step_ >= config_.planner.replan_period) ReplanFromCommit(s, v);
}

void Episode::Advance() {
  const Eigen::Vector3d previous = state_.position;
  if (!trajectory_.empty()) {
    trajectory_time_ = std::min(trajectory_time_ + config_.dt, trajectory_.duration());
    const double s = trajectory_.DistanceAtTime(trajectory_time_);
    state_.position = trajectory_.PointAtDistance(s);
    state_.velocity = trajectory_.SpeedAtDistance(s) * trajectory_.DirectionAtDistance(s);
  } else {
    state_.velocity.setZero();
  }
  state_.time = static_cast<double>(step_ + 1) * config_.dt;
  result_.trajectory_length += (state_.position - previous).norm();
  result_.executed_path.push_back(state_.position);
}

bool Episode::InCollision(const Eigen::Vector3d& p) const {
  const OccupancyGrid& gt = scene_.grid;
  const GridGeometry& g = gt.geometry();
  const double r = config_.planner.robot_radius;
  const GridIndex lo = g.WorldToIndexUnchecked(p - Eigen::Vector3d::Constant(r));
  const GridIndex hi = g.WorldToIndexUnchecked(p + Eigen::Vector3d::Constant(r));
  const double res = g.resolution();
  for (int i = std::max(lo.i, 0); i <= std::min(hi.i, g.dims().x - 1); ++i) {
    for (int j = std::max(lo.j, 0); j <= std::min(hi.j, g.dims().y - 1); ++j) {
      for (int k = std::max(lo.k, 0); k <= std::min(hi.k, g.dims().z - 1); ++k) {
        if (gt.at({i, j, k}) <= kDefaultOccupancyThreshold) continue;
        const Eigen::Vector3d cell_lo = g.origin() + Eigen::Vector3d(i, j, k) * res;
        const Eigen::Vector3d cell_hi = cell_lo + Eigen::Vector3d::Constant(res);
        const Eigen::Vector3d gap = (cell_lo - p).cwiseMax(p - cell_hi).cwiseMax(0.0);
        if (gap.norm() < r) return true;
      }
    }
  }
  return false;
}

void Episode::Finish(bool success, FailureCause cause) {
  done_ = true;
  result_.success = success;
  result_.failure = cause;
  result_.travel_time = state_.time;
  result_.steps = step_;
  if (scheduler_) {
    stats_.prediction_refreshes = scheduler_->refreshed();
    stats_.prediction_skips = scheduler_->skipped();
  }
}

void Episode::Step() {
  if (done_) return;
  if (step_ % config_.sensor.period == 0) {
    const ScanResult scan = SimulateScan(scene_.grid, state_.position, config_.sensor, directions_, rng_);
    map_.UpdateOriginal(scan.observations);
  }
  if (scheduler_) scheduler_->Step(step_, map_, state_.position);
  RefreshView();
  UpdatePlan();
  Advance();
  ++step_;

  const PlannerConfig& pc = config_.planner;
  if (InCollision(state_.position)) {
    Finish(false, FailureCause::kCollision);
  } else if ((state_.position - scene_.goal).norm() <= pc.goal_radius) {
    Finish(true, FailureCause::kNone);
  } else if (state_.time >= pc.timeout - 1e-9) {
    Finish(false, FailureCause::kTimeout);
  } else {
    const auto window = static_cast<std::size_t>(std::ceil(pc.stuck_window / config_.dt - 1e-9));
    const std::vector<Eigen::Vector3d>& path = result_.executed_path;
    if (path.size() > window && (path.back() - path[path.size() - 1 - window]).norm() < pc.stuck_distance) {
      Finish(false, FailureCause::kStuck);
    }
  }
}

EpisodeResult RunEpisode(const Scene& scene, const Scheme& scheme, const EpisodeConfig& config,
                         const Predictor* predictor, std::uint64_t seed, EpisodeStats* stats) {
  Episode episode(scene, scheme, config, predictor, seed);
  while (!episode.done()) episode.Step();
  if (stats != nullptr) *stats = episode.stats();
  return episode.result();
}

}  // namespace occpred
