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

#ifndef OCCPRED_NAVSIM_PLANNER_H_
#define OCCPRED_NAVSIM_PLANNER_H_

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "occpred/navmap/double_layer_map.h"
#include "occpred/navsim/trajectory.h"
#include "occpred/voxel/grid.h"

namespace occpred {

enum class SchemeKind {
  kAggressive,    // original layer only, unknown = free
  kConservative,  // original layer only, unknown = occupied
  kPredicted,     // fused query over both layers
};

struct Scheme {
  SchemeKind kind = SchemeKind::kAggressive;
  std::string predictor;  // predictor id for kPredicted, empty otherwise

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

// "AGGRESSIVE", "CONSERVATIVE", "PREDICTED(<id>)".
std::string ToString(const Scheme& scheme);
// Inverse of ToString; predictor ids are ORACLE, ALL_FREE, ALL_OCCUPIED,
// PASSTHROUGH, FAILING and OPNET. Throws kInvalidArgument otherwise.
Scheme SchemeFromString(const std::string& text);

struct PlannerConfig {
  double robot_radius = 0.2;    // metres; also the ground-truth collision radius
  double safety_margin = 0.1;   // extra inflation on top of the radius
  double v_max = 2.0;           // m/s
  double a_max = 2.0;           // m/s^2
  int replan_period = 10;       // steps
  int connectivity = 26;        // only 26 is supported
  int smoothing_iterations = 2; // line-of-sight shortcut passes
  double timeout = 60.0;        // seconds
  double goal_radius = 0.3;     // metres
  double stuck_window = 5.0;    // seconds
  double stuck_distance = 0.1;  // minimum displacement over the window
  double escape_radius = 1.0;   // furthest a start inside inflation may be moved out
  double inflation() const { return robot_radius + safety_margin; }
  void Validate() const;
};

nlohmann::json ToJson(const PlannerConfig& config);
PlannerConfig PlannerConfigFromJson(const nlohmann::json& json);

// Per-cell blocked mask (1 = blocked) of the map under a scheme, before
// inflation: AGGRESSIVE blocks known cells above the threshold, CONSERVATIVE
// additionally blocks unknown cells, PREDICTED blocks where the fused query
// reports occupied.
std::vector<std::uint8_t> SchemeBlockedMask(const DoubleLayerMap& map, SchemeKind kind, const FusionParams& fusion);

// Collision view: raw mask plus its dilation by the inflation radius. Points
// and cells outside the grid are blocked.
class CollisionView {
 public:
  CollisionView(const GridGeometry& geometry, std::vector<std::uint8_t> raw, double inflation);

  const GridGeometry& geometry() const { return geometry_; }
  bool RawBlocked(const GridIndex& index) const;
  bool Blocked(const GridIndex& index) const;
  bool BlockedAt(const Eigen::Vector3d& point) const;
  // True when every cell the segment passes through (exact voxel traversal,
  // so in particular every sample point at any spacing) is free.
  bool SegmentFree(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;
  // Arc length, from `s_from` on, where the trajectory first enters a blocked
  // cell (exact traversal); nullopt when the rest of it is free.
  std::optional<double> FirstBlocked(const Trajectory& trajectory, double s_from) const;

 private:
  // Distance along a->b to the first blocked cell.
  std::optional<double> FirstBlockedOnSegment(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;

  GridGeometry geometry_;
  std::vector<std::uint8_t> raw_;
  std::vector<std::uint8_t> inflated_;
};

enum class StartPolicy {
  kStrict,  // a start inside the inflated view is invalid
  kEscape,  // a start blocked only by inflation first moves to the nearest free cell
};

// 26-connected A* over free cells of the view; diagonal moves require every
// cell of the spanned box to be free. Returns world points: the exact start,
// interior cell centres, the exact goal. Throws kInvalidStart when the start
// is blocked (see StartPolicy) and kPlanFailed when the goal is blocked or
// unreachable.
std::vector<Eigen::Vector3d> SearchPath(const CollisionView& view, const Eigen::Vector3d& start,
                                        const Eigen::Vector3d& goal, StartPolicy policy = StartPolicy::kStrict,
                                        double escape_radius = 1.0);

// Greedy line-of-sight shortcutting; each pass keeps the first point and
// jumps to the furthest point reachable by a straight free segment scanning
// forward. The result keeps the original endpoints.
std::vector<Eigen::Vector3d> ShortcutPath(const CollisionView& view, const std::vector<Eigen::Vector3d>& path,
                                          int iterations);

// Search, shortcut and trapezoidal time-parameterization.
Trajectory Plan(const CollisionView& view, const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                const PlannerConfig& config, double v_start = 0.0, StartPolicy policy = StartPolicy::kStrict);

struct LocalPlan {
  std::vector<Eigen::Vector3d> path;  // shortcut world path
  bool reaches_goal = false;
  // Arc length of the leading escape manoeuvre (inside inflation), 0 if none.
  double escape_length = 0.0;
};

// Like Plan's search, but when the goal is blocked or unreachable, heads for
// the reachable cell closest to the goal instead. Throws kInvalidStart as
// SearchPath, and kPlanFailed when no reachable cell is closer to the goal
// than the start.
LocalPlan PlanTowardGoal(const CollisionView& view, const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                         const PlannerConfig& config, StartPolicy policy = StartPolicy::kStrict);

}  // namespace occpred

#endif  // OCCPRED_NAVSIM_PLANNER_H_
