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

#ifndef OCCPRED_NAVSIM_TRAJECTORY_H_
#define OCCPRED_NAVSIM_TRAJECTORY_H_

#include <Eigen/Core>
#include <vector>

namespace occpred {

// Straight piece of a trajectory with a trapezoidal speed profile: the speed
// at arc length x is min(v_max, sqrt(v0^2 + 2 a x), sqrt(v1^2 + 2 a (L - x))).
class TrajectorySegment {
 public:
  TrajectorySegment(const Eigen::Vector3d& from, const Eigen::Vector3d& to, double v0, double v1, double v_max,
                    double a_max);

  const Eigen::Vector3d& from() const { return from_; }
  const Eigen::Vector3d& to() const { return to_; }
  double length() const { return length_; }
  double duration() const { return t_acc_ + t_cruise_ + t_dec_; }
  double v_start() const { return SpeedAt(0.0); }
  double v_end() const { return SpeedAt(length_); }

  double SpeedAt(double x) const;
  double TimeAt(double x) const;
  double DistanceAt(double t) const;
  Eigen::Vector3d PointAt(double x) const;

 private:
  Eigen::Vector3d from_;
  Eigen::Vector3d to_;
  double length_;
  double v0_;
  double v1_;
  double v_max_;
  double a_;
  double x_acc_;    // end of the acceleration phase
  double x_dec_;    // start of the deceleration phase
  double v_peak_;
  double t_acc_;
  double t_cruise_;
  double t_dec_;
};

struct Waypoint {
  Eigen::Vector3d position;
  double time;
  double speed;
};

// Piecewise-linear path with a time parameterization bounded by v_max and
// a_max. Speeds are continuous except where a caller-imposed start speed
// cannot be braked down in time for the first corner; the speed then drops
// to the feasible value at the start.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double v_max, double a_max) : v_max_(v_max), a_max_(a_max) {}

  // Corner speed caps v_max * max(0.1, (1 + cos(turn)) / 2) at interior
  // vertices, then forward (acceleration) and backward (braking) passes.
  // Consecutive duplicate points are dropped. Throws kInvalidArgument for a
  // non-positive v_max or a_max or fewer than one point.
  static Trajectory FromPath(const std::vector<Eigen::Vector3d>& points, double v_start, double v_max, double a_max,
                             double v_end = 0.0);

  bool empty() const { return segments_.empty(); }
  const std::vector<TrajectorySegment>& segments() const { return segments_; }
  double v_max() const { return v_max_; }
  double a_max() const { return a_max_; }
  double length() const;
  double duration() const;
  Eigen::Vector3d start() const;
  Eigen::Vector3d end() const;

  // Arc-length queries clamp to [0, length()].
  double SpeedAtDistance(double s) const;
  Eigen::Vector3d PointAtDistance(double s) const;
  // Unit direction of the segment containing s (the incoming one at a vertex).
  Eigen::Vector3d DirectionAtDistance(double s) const;
  double TimeAtDistance(double s) const;
  double DistanceAtTime(double t) const;

  // Portion between arc lengths s0 <= s1 following the same speed profile.
  Trajectory Slice(double s0, double s1) const;
  // Braking at a_max from arc length s to rest along the same path (shorter
  // if the path ends first).
  Trajectory BrakeFrom(double s) const;
  // Appends `other`, which should start where this one ends.
  void Append(const Trajectory& other);

  // Vertices with their timestamps (strictly increasing) and speeds.
  std::vector<Waypoint> Waypoints() const;

 private:
  // Index of the segment containing arc length s and the offset into it.
  std::pair<std::size_t, double> Locate(double s) const;

  double v_max_ = 1.0;
  double a_max_ = 1.0;
  std::vector<TrajectorySegment> segments_;
  std::vector<double> start_s_;  // arc length at each segment start
  std::vector<double> start_t_;  // time at each segment start
};

}  // namespace occpred

#endif  // OCCPRED_NAVSIM_TRAJECTORY_H_
