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

#include "occpred/navsim/planner.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/voxel/inflate.h"
#include "occpred/voxel/raycast.h"

namespace occpred {
namespace {

constexpr std::array<const char*, 6> kPredictorIds = {"ORACLE", "ALL_FREE", "ALL_OCCUPIED",
                                                      "PASSTHROUGH", "FAILING", "OPNET"};

std::array<GridIndex, 26> NeighborOffsets() {
  std::array<GridIndex, 26> out{};
  std::size_t n = 0;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int dk = -1; dk <= 1; ++dk) {
        if (di != 0 || dj != 0 || dk != 0) out[n++] = {di, dj, dk};
      }
    }
  }
  return out;
}

const std::array<GridIndex, 26> kNeighbors = NeighborOffsets();

// Distance within which a segment counts as touching a cell box, metres.
constexpr double kTouch = 1e-6;

GridIndex Add(const GridIndex& a, const GridIndex& b) { return {a.i + b.i, a.j + b.j, a.k + b.k}; }

// Every cell of the box spanned by `from` and `from + step` passes `free`.
template <typename FreeFn>
bool BoxFree(const GridIndex& from, const GridIndex& step, FreeFn&& free) {
  for (int a = 0; a <= (step.i != 0 ? 1 : 0); ++a) {
    for (int b = 0; b <= (step.j != 0 ? 1 : 0); ++b) {
      for (int c = 0; c <= (step.k != 0 ? 1 : 0); ++c) {
        if (!free(GridIndex{from.i + a * step.i, from.j + b * step.j, from.k + c * step.k})) return false;
      }
    }
  }
  return true;
}

struct StartResolution {
  std::vector<GridIndex> escape;  // start cell first; the search starts from the last
};

StartResolution ResolveStart(const CollisionView& view, const GridIndex& start, StartPolicy policy,
                             double escape_radius) {
  Require(view.geometry().Contains(start), ErrorCode::kInvalidStart, "start is outside the grid");
  if (!view.Blocked(start)) return {{start}};
  Require(policy == StartPolicy::kEscape && !view.RawBlocked(start), ErrorCode::kInvalidStart,
          "start " + ToString(start) + " is in collision");
  // Breadth-first search through raw-free cells for the nearest inflated-free one.
  const GridGeometry& g = view.geometry();
  const double max_cells = escape_radius / g.resolution();
  std::vector<std::int64_t> parent(static_cast<std::size_t>(g.cell_count()), -2);
  std::deque<GridIndex> queue{start};
  parent[static_cast<std::size_t>(g.Linear(start))] = -1;
  auto raw_free = [&](const GridIndex& c) { return g.Contains(c) && !view.RawBlocked(c); };
  while (!queue.empty()) {
    const GridIndex cur = queue.front();
    queue.pop_front();
    if (!view.Blocked(cur)) {
      std::vector<GridIndex> chain;
      for (std::int64_t l = g.Linear(cur); l >= 0; l = parent[static_cast<std::size_t>(l)]) {
        chain.push_back(g.Unlinear(l));
      }
      std::reverse(chain.begin(), chain.end());
      return {chain};
    }
    for (const GridIndex& d : kNeighbors) {
      const GridIndex next = Add(cur, d);
      if (!g.Contains(next) || parent[static_cast<std::size_t>(g.Linear(next))] != -2) continue;
      const Eigen::Vector3d delta(next.i - start.i, next.j - start.j, next.k - start.k);
      if (delta.norm() > max_cells || !BoxFree(cur, d, raw_free)) continue;
      parent[static_cast<std::size_t>(g.Linear(next))] = g.Linear(cur);
      queue.push_back(next);
    }
  }
  Throw(ErrorCode::kInvalidStart, "no free cell within the escape radius of " + ToString(start));
}

struct SearchOutcome {
  std::vector<std::int64_t> parent;  // -2 unvisited, -1 root
  std::vector<std::int64_t> closed;  // expansion order
  bool reached = false;
};

// A* from `start` toward `goal`; expands the whole reachable component when
// the goal cannot be reached (or `goal_free` is false).
SearchOutcome AStar(const CollisionView& view, const GridIndex& start, const GridIndex& goal, bool goal_free) {
  const GridGeometry& g = view.geometry();
  const std::size_t n = static_cast<std::size_t>(g.cell_count());
  SearchOutcome out;
  out.parent.assign(n, -2);
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> closed(n, 0);
  auto h = [&](const GridIndex& c) {
    return Eigen::Vector3d(c.i - goal.i, c.j - goal.j, c.k - goal.k).norm();
  };
  using Entry = std::pair<double, std::int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::int64_t s = g.Linear(start);
  cost[static_cast<std::size_t>(s)] = 0.0;
  out.parent[static_cast<std::size_t>(s)] = -1;
  open.emplace(h(start), s);
  const std::int64_t goal_linear = g.Linear(goal);
  auto free = [&](const GridIndex& c) { return g.Contains(c) && !view.Blocked(c); };
  while (!open.empty()) {
    const std::int64_t cur_linear = open.top().second;
    open.pop();
    const std::size_t cu = static_cast<std::size_t>(cur_linear);
    if (closed[cu]) continue;
    closed[cu] = 1;
    out.closed.push_back(cur_linear);
    if (goal_free && cur_linear == goal_linear) {
      out.reached = true;
      return out;
    }
    const GridIndex cur = g.Unlinear(cur_linear);
    for (const GridIndex& d : kNeighbors) {
      const GridIndex next = Add(cur, d);
      if (!g.Contains(next)) continue;
      const std::size_t nu = static_cast<std::size_t>(g.Linear(next));
      if (closed[nu] || !BoxFree(cur, d, free)) continue;
      const double step = std::sqrt(static_cast<double>(d.i * d.i + d.j * d.j + d.k * d.k));
      const double candidate = cost[cu] + step;
      if (candidate < cost[nu]) {
        cost[nu] = candidate;
        out.parent[nu] = cur_linear;
        open.emplace(candidate + h(next), static_cast<std::int64_t>(nu));
      }
    }
  }
  return out;
}

std::vector<GridIndex> Chain(const GridGeometry& g, const std::vector<std::int64_t>& parent, std::int64_t last) {
  std::vector<GridIndex> cells;
  for (std::int64_t l = last; l >= 0; l = parent[static_cast<std::size_t>(l)]) cells.push_back(g.Unlinear(l));
  std::reverse(cells.begin(), cells.end());
  return cells;
}

// Exact start, centres of the interior cells, then `end`.
std::vector<Eigen::Vector3d> ToWorld(const GridGeometry& g, const Eigen::Vector3d& start,
                                     const std::vector<GridIndex>& cells, const Eigen::Vector3d& end) {
  std::vector<Eigen::Vector3d> pts{start};
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) pts.push_back(g.IndexToWorld(cells[i]));
  pts.push_back(end);
  return pts;
}

double PathLength(const std::vector<Eigen::Vector3d>& pts, std::size_t count) {
  double len = 0.0;
  for (std::size_t i = 1; i < std::min(count, pts.size()); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

struct SearchPlan {
  std::vector<Eigen::Vector3d> points;
  std::size_t escape_points = 0;  // leading points that belong to the escape manoeuvre
  bool reaches_goal = false;
};

SearchPlan Search(const CollisionView& view, const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                  StartPolicy policy, double escape_radius, bool allow_partial) {
  const GridGeometry& g = view.geometry();
  Require(g.Contains(start), ErrorCode::kInvalidStart, "start is outside the grid");
  const StartResolution resolved = ResolveStart(view, g.WorldToIndex(start), policy, escape_radius);
  const GridIndex search_start = resolved.escape.back();
  const bool goal_inside = g.Contains(goal);
  const GridIndex goal_cell = goal_inside ? g.WorldToIndex(goal) : g.WorldToIndexUnchecked(goal);
  const bool goal_free = goal_inside && !view.Blocked(goal_cell);
  if (!goal_free && !allow_partial) Throw(ErrorCode::kPlanFailed, "goal is blocked under the current view");
  const GridIndex target = goal_inside ? goal_cell : search_start;
  const SearchOutcome outcome = AStar(view, search_start, target, goal_free);

  SearchPlan plan;
  std::int64_t last = g.Linear(target);
  Eigen::Vector3d end = goal;
  if (!outcome.reached) {
    if (!allow_partial) Throw(ErrorCode::kPlanFailed, "goal is unreachable under the current view");
    // Closest expanded cell to the goal; ties keep the earliest expansion.
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t l : outcome.closed) {
      const double d = (g.IndexToWorld(g.Unlinear(l)) - goal).norm();
      if (d < best) {
        best = d;
        last = l;
      }
    }
    end = g.IndexToWorld(g.Unlinear(last));
    Require(best < (start - goal).norm() - g.resolution(), ErrorCode::kPlanFailed,
            "no reachable cell is closer to the goal");
  }
  plan.reaches_goal = outcome.reached;
  std::vector<GridIndex> cells = resolved.escape;
  const std::vector<GridIndex> searched = Chain(g, outcome.parent, last);
  cells.insert(cells.end(), searched.begin() + 1, searched.end());
  plan.points = ToWorld(g, start, cells, end);
  plan.escape_points = resolved.escape.size() > 1 ? resolved.escape.size() : 0;
  return plan;
}

std::vector<Eigen::Vector3d> ShortcutFrom(const CollisionView& view, const std::vector<Eigen::Vector3d>& path,
                                          std::size_t keep, int iterations) {
  // The first `keep` points are copied unchanged (escape manoeuvre).
  keep = std::min(keep, path.size());
  std::vector<Eigen::Vector3d> head(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(keep));
  std::vector<Eigen::Vector3d> tail(path.begin() + static_cast<std::ptrdiff_t>(keep > 0 ? keep - 1 : 0), path.end());
  tail = ShortcutPath(view, tail, iterations);
  if (keep > 0) tail.erase(tail.begin());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

std::string ToString(const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::kAggressive:
      return "AGGRESSIVE";
    case SchemeKind::kConservative:
      return "CONSERVATIVE";
    case SchemeKind::kPredicted:
      return "PREDICTED(" + scheme.predictor + ")";
  }
  return "?";
}

Scheme SchemeFromString(const std::string& text) {
  if (text == "AGGRESSIVE") return {SchemeKind::kAggressive, ""};
  if (text == "CONSERVATIVE") return {SchemeKind::kConservative, ""};
  const std::string prefix = "PREDICTED(";
  if (text.size() > prefix.size() + 1 && text.compare(0, prefix.size(), prefix) == 0 && text.back() == ')') {
    const std::string id = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    if (std::find(kPredictorIds.begin(), kPredictorIds.end(), id) != kPredictorIds.end()) {
      return {SchemeKind::kPredicted, id};
    }
  }
  Throw(ErrorCode::kInvalidArgument, "unknown scheme '" + text + "'");
}

void PlannerConfig::Validate() const {
  Require(robot_radius > 0.0 && safety_margin >= 0.0, ErrorCode::kInvalidArgument,
          "planner: robot_radius must be > 0 and safety_margin >= 0");
  Require(v_max > 0.0 && a_max > 0.0, ErrorCode::kInvalidArgument, "planner: v_max and a_max must be > 0");
  Require(replan_period >= 1, ErrorCode::kInvalidArgument, "planner: replan_period must be >= 1");
  Require(connectivity == 26, ErrorCode::kInvalidArgument, "planner: only 26-connectivity is supported");
  Require(smoothing_iterations >= 0, ErrorCode::kInvalidArgument, "planner: smoothing_iterations must be >= 0");
  Require(timeout > 0.0 && goal_radius > 0.0, ErrorCode::kInvalidArgument,
          "planner: timeout and goal_radius must be > 0");
  Require(stuck_window > 0.0 && stuck_distance > 0.0 && escape_radius >= 0.0, ErrorCode::kInvalidArgument,
          "planner: stuck_window and stuck_distance must be > 0, escape_radius >= 0");
}

nlohmann::json ToJson(const PlannerConfig& c) {
  return {{"robot_radius", c.robot_radius},
          {"safety_margin", c.safety_margin},
          {"v_max", c.v_max},
          {"a_max", c.a_max},
          {"replan_period", c.replan_period},
          {"connectivity", c.connectivity},
          {"smoothing_iterations", c.smoothing_iterations},
          {"timeout", c.timeout},
          {"goal_radius", c.goal_radius},
          {"stuck_window", c.stuck_window},
          {"stuck_distance", c.stuck_distance},
          {"escape_radius", c.escape_radius}};
}

PlannerConfig PlannerConfigFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json,
                    {"robot_radius", "safety_margin", "v_max", "a_max", "replan_period", "connectivity",
                     "smoothing_iterations", "timeout", "goal_radius", "stuck_window", "stuck_distance",
                     "escape_radius"},
                    "planner");
  PlannerConfig c;
  ReadOptional(json, "robot_radius", c.robot_radius);
  ReadOptional(json, "safety_margin", c.safety_margin);
  ReadOptional(json, "v_max", c.v_max);
  ReadOptional(json, "a_max", c.a_max);
  ReadOptional(json, "replan_period", c.replan_period);
  ReadOptional(json, "connectivity", c.connectivity);
  ReadOptional(json, "smoothing_iterations", c.smoothing_iterations);
  ReadOptional(json, "timeout", c.timeout);
  ReadOptional(json, "goal_radius", c.goal_radius);
  ReadOptional(json, "stuck_window", c.stuck_window);
  ReadOptional(json, "stuck_distance", c.stuck_distance);
  ReadOptional(json, "escape_radius", c.escape_radius);
  try {
    c.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return c;
}

std::vector<std::uint8_t> SchemeBlockedMask(const DoubleLayerMap& map, SchemeKind kind, const FusionParams& fusion) {
  const std::span<const float> original = map.original().cells();
  std::vector<std::uint8_t> mask(original.size(), 0);
  switch (kind) {
    case SchemeKind::kAggressive:
      for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = IsKnown(original[i]) && original[i] > fusion.threshold;
      break;
    case SchemeKind::kConservative:
      for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = IsUnknown(original[i]) || original[i] > fusion.threshold;
      break;
    case SchemeKind::kPredicted: {
      // Same rule as DoubleLayerMap::QueryOccupied, evaluated over the arrays.
      const std::span<const float> predicted = map.predicted().cells();
      for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = FusedValue(original[i], predicted[i], fusion) > fusion.threshold;
      }
      break;
    }
  }
  return mask;
}

CollisionView::CollisionView(const GridGeometry& geometry, std::vector<std::uint8_t> raw, double inflation)
    : geometry_(geometry), raw_(std::move(raw)) {
  Require(static_cast<std::int64_t>(raw_.size()) == geometry.cell_count(), ErrorCode::kInvalidArgument,
          "collision view: mask size does not match the geometry");
  Require(inflation >= 0.0, ErrorCode::kInvalidArgument, "collision view: inflation must be >= 0");
  inflated_ = Dilate(geometry_, raw_, inflation);
}

bool CollisionView::RawBlocked(const GridIndex& index) const {
  return !geometry_.Contains(index) || raw_[static_cast<std::size_t>(geometry_.Linear(index))] != 0;
}

bool CollisionView::Blocked(const GridIndex& index) const {
  return !geometry_.Contains(index) || inflated_[static_cast<std::size_t>(geometry_.Linear(index))] != 0;
}

bool CollisionView::BlockedAt(const Eigen::Vector3d& point) const {
  if (!geometry_.Contains(point)) return true;
  return Blocked(geometry_.WorldToIndex(point));
}

bool CollisionView::SegmentFree(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
  return !FirstBlockedOnSegment(a, b).has_value();
}

std::optional<double> CollisionView::FirstBlockedOnSegment(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
  const double len = (b - a).norm();
  if (!geometry_.Contains(a) || !geometry_.Contains(b)) return 0.0;
  const Eigen::Vector3d dir = len > 0.0 ? Eigen::Vector3d((b - a) / len) : Eigen::Vector3d::UnitX();
  const double res = geometry_.resolution();
  // Earliest parameter in [0, len] where the segment is within kTouch of the
  // closed box of a blocked cell around `c` (the cell or a neighbour), so a
  // segment grazing an edge or corner shared with a blocked cell is blocked
  // regardless of traversal tie-breaking.
  auto first_touch = [&](const GridIndex& c) {
    double best = std::numeric_limits<double>::infinity();
    for (int n = -1; n < 26; ++n) {
      const GridIndex cell = n < 0 ? c : Add(c, kNeighbors[static_cast<std::size_t>(n)]);
      if (!Blocked(cell)) continue;
      const Eigen::Vector3d lo = geometry_.origin() + Eigen::Vector3d(cell.i, cell.j, cell.k) * res;
      double t0 = 0.0;
      double t1 = len;
      for (int ax = 0; ax < 3 && t0 <= t1; ++ax) {
        const double lo_ax = lo[ax] - kTouch;
        const double hi_ax = lo[ax] + res + kTouch;
        if (std::abs(dir[ax]) < 1e-15) {
          if (a[ax] < lo_ax || a[ax] > hi_ax) t0 = t1 + 1.0;
          continue;
        }
        double ta = (lo_ax - a[ax]) / dir[ax];
        double tb = (hi_ax - a[ax]) / dir[ax];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
      }
      if (t0 <= t1) best = std::min(best, t0);
    }
    return best;
  };
  std::optional<double> hit;
  TraverseRay(geometry_, a, dir, len, [&](const GridIndex& c, double) {
    const double t = first_touch(c);
    if (t <= len) hit = t;
    return !hit.has_value();
  });
  return hit;
}

std::optional<double> CollisionView::FirstBlocked(const Trajectory& trajectory, double s_from) const {
  if (trajectory.empty()) return std::nullopt;
  double seg_start = 0.0;
  for (const TrajectorySegment& seg : trajectory.segments()) {
    const double seg_end = seg_start + seg.length();
    if (seg_end >= s_from) {
      const double from = std::max(s_from, seg_start);
      const std::optional<double> hit = FirstBlockedOnSegment(seg.PointAt(from - seg_start), seg.to());
      if (hit) return from + *hit;
    }
    seg_start = seg_end;
  }
  return std::nullopt;
}

std::vector<Eigen::Vector3d> SearchPath(const CollisionView& view, const Eigen::Vector3d& start,
                                        const Eigen::Vector3d& goal, StartPolicy policy, double escape_radius) {
  return Search(view, start, goal, policy, escape_radius, false).points;
}

std::vector<Eigen::Vector3d> ShortcutPath(const CollisionView& view, const std::vector<Eigen::Vector3d>& path,
                                          int iterations) {
  std::vector<Eigen::Vector3d> cur = path;
  for (int it = 0; it < iterations && cur.size() > 2; ++it) {
    std::vector<Eigen::Vector3d> next{cur.front()};
    std::size_t i = 0;
    while (i + 1 < cur.size()) {
      std::size_t j = i + 1;
      while (j + 1 < cur.size() && view.SegmentFree(cur[i], cur[j + 1])) ++j;
      next.push_back(cur[j]);
      i = j;
    }
    if (next.size() == cur.size()) break;
    cur = std::move(next);
  }
  return cur;
}

Trajectory Plan(const CollisionView& view, const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                const PlannerConfig& config, double v_start, StartPolicy policy) {
  config.Validate();
  const SearchPlan plan = Search(view, start, goal, policy, config.escape_radius, false);
  const std::vector<Eigen::Vector3d> path = ShortcutFrom(view, plan.points, plan.escape_points,
                                                         config.smoothing_iterations);
  return Trajectory::FromPath(path, v_start, config.v_max, config.a_max);
}

LocalPlan PlanTowardGoal(const CollisionView& view, const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                         const PlannerConfig& config, StartPolicy policy) {
  config.Validate();
  const SearchPlan plan = Search(view, start, goal, policy, config.escape_radius, true);
  LocalPlan out;
  out.path = ShortcutFrom(view, plan.points, plan.escape_points, config.smoothing_iterations);
  out.reaches_goal = plan.reaches_goal;
  out.escape_length = PathLength(out.path, plan.escape_points);
  return out;
}

}  // namespace occpred
