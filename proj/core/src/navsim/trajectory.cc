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

#include "occpred/navsim/trajectory.h"

#include <algorithm>
#include <cmath>

#include "occpred/common/error.h"

namespace occpred {
namespace {

constexpr double kMinSegment = 1e-9;
constexpr double kMinCornerFactor = 0.1;

}  // namespace

TrajectorySegment::TrajectorySegment(const Eigen::Vector3d& from, const Eigen::Vector3d& to, double v0, double v1,
                                     double v_max, double a_max)
    : from_(from), to_(to), length_((to - from).norm()), v_max_(v_max), a_(a_max) {
  Require(v_max > 0.0 && a_max > 0.0, ErrorCode::kInvalidArgument, "segment: v_max and a_max must be > 0");
  Require(v0 >= 0.0 && v1 >= 0.0, ErrorCode::kInvalidArgument, "segment: speeds must be >= 0");
  const double L = length_;
  // Effective boundary speeds of the profile.
  v0_ = std::min({v0, v_max, std::sqrt(v1 * v1 + 2.0 * a_ * L)});
  v1_ = std::min({v1, v_max, std::sqrt(v0_ * v0_ + 2.0 * a_ * L)});
  const double xa = (v_max * v_max - v0_ * v0_) / (2.0 * a_);
  const double xd = L - (v_max * v_max - v1_ * v1_) / (2.0 * a_);
  if (xa <= xd) {
    x_acc_ = xa;
    x_dec_ = xd;
    v_peak_ = v_max;
  } else {
    const double xp = std::clamp((v1_ * v1_ - v0_ * v0_ + 2.0 * a_ * L) / (4.0 * a_), 0.0, L);
    x_acc_ = xp;
    x_dec_ = xp;
    v_peak_ = std::min(v_max, std::sqrt(v0_ * v0_ + 2.0 * a_ * xp));
  }
  t_acc_ = (v_peak_ - v0_) / a_;
  t_cruise_ = v_peak_ > 0.0 ? (x_dec_ - x_acc_) / v_peak_ : 0.0;
  t_dec_ = (v_peak_ - v1_) / a_;
}

double TrajectorySegment::SpeedAt(double x) const {
  x = std::clamp(x, 0.0, length_);
  return std::min({v_max_, std::sqrt(v0_ * v0_ + 2.0 * a_ * x), std::sqrt(v1_ * v1_ + 2.0 * a_ * (length_ - x))});
}

double TrajectorySegment::TimeAt(double x) const {
  x = std::clamp(x, 0.0, length_);
  if (x <= x_acc_) return (std::sqrt(v0_ * v0_ + 2.0 * a_ * x) - v0_) / a_;
  if (x <= x_dec_) return t_acc_ + (x - x_acc_) / v_peak_;
  const double u = std::sqrt(v1_ * v1_ + 2.0 * a_ * (length_ - x));
  return t_acc_ + t_cruise_ + (v_peak_ - u) / a_;
}

double TrajectorySegment::DistanceAt(double t) const {
  t = std::clamp(t, 0.0, duration());
  if (t <= t_acc_) return std::min(x_acc_, v0_ * t + 0.5 * a_ * t * t);
  t -= t_acc_;
  if (t <= t_cruise_) return std::min(x_dec_, x_acc_ + v_peak_ * t);
  t -= t_cruise_;
  return std::min(length_, x_dec_ + v_peak_ * t - 0.5 * a_ * t * t);
}

Eigen::Vector3d TrajectorySegment::PointAt(double x) const {
  if (length_ <= 0.0) return from_;
  return from_ + (to_ - from_) * (std::clamp(x, 0.0, length_) / length_);
}

Trajectory Trajectory::FromPath(const std::vector<Eigen::Vector3d>& points, double v_start, double v_max,
                                double a_max, double v_end) {
  Require(v_max > 0.0 && a_max > 0.0, ErrorCode::kInvalidArgument, "trajectory: v_max and a_max must be > 0");
  Require(!points.empty(), ErrorCode::kInvalidArgument, "trajectory: empty path");
  std::vector<Eigen::Vector3d> pts{points.front()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    if ((points[i] - pts.back()).norm() > kMinSegment) pts.push_back(points[i]);
  }
  Trajectory traj(v_max, a_max);
  const std::size_t n = pts.size();
  if (n < 2) return traj;
  std::vector<double> len(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) len[i] = (pts[i + 1] - pts[i]).norm();
  std::vector<double> v(n);
  v[0] = std::min(v_start, v_max);
  v[n - 1] = std::min(v_end, v_max);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Eigen::Vector3d d0 = (pts[i] - pts[i - 1]).normalized();
    const Eigen::Vector3d d1 = (pts[i + 1] - pts[i]).normalized();
    v[i] = v_max * std::max(kMinCornerFactor, 0.5 * (1.0 + d0.dot(d1)));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) v[i + 1] = std::min(v[i + 1], std::sqrt(v[i] * v[i] + 2.0 * a_max * len[i]));
  for (std::size_t i = n - 1; i > 0; --i) v[i - 1] = std::min(v[i - 1], std::sqrt(v[i] * v[i] + 2.0 * a_max * len[i - 1]));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Trajectory one(v_max, a_max);
    one.segments_.emplace_back(pts[i], pts[i + 1], v[i], v[i + 1], v_max, a_max);
    one.start_s_ = {0.0};
    one.start_t_ = {0.0};
    traj.Append(one);
  }
  return traj;
}

double Trajectory::length() const {
  return segments_.empty() ? 0.0 : start_s_.back() + segments_.back().length();
}

double Trajectory::duration() const {
  return segments_.empty() ? 0.0 : start_t_.back() + segments_.back().duration();
}

Eigen::Vector3d Trajectory::start() const {
  Require(!segments_.empty(), ErrorCode::kInvalidArgument, "trajectory is empty");
  return segments_.front().from();
}

Eigen::Vector3d Trajectory::end() const {
  Require(!segments_.empty(), ErrorCode::kInvalidArgument, "trajectory is empty");
  return segments_.back().to();
}

std::pair<std::size_t, double> Trajectory::Locate(double s) const {
  Require(!segments_.empty(), ErrorCode::kInvalidArgument, "trajectory is empty");
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(start_s_.begin(), start_s_.end(), s);
  std::size_t i = it == start_s_.begin() ? 0 : static_cast<std::size_t>(it - start_s_.begin()) - 1;
  return {i, s - start_s_[i]};
}

double Trajectory::SpeedAtDistance(double s) const {
  const auto [i, x] = Locate(s);
  return segments_[i].SpeedAt(x);
}

Eigen::Vector3d Trajectory::PointAtDistance(double s) const {
  const auto [i, x] = Locate(s);
  return segments_[i].PointAt(x);
}

Eigen::Vector3d Trajectory::DirectionAtDistance(double s) const {
  auto [i, x] = Locate(s);
  if (x <= 0.0 && i > 0) --i;
  const TrajectorySegment& seg = segments_[i];
  return (seg.to() - seg.from()).normalized();
}

double Trajectory::TimeAtDistance(double s) const {
  const auto [i, x] = Locate(s);
  return start_t_[i] + segments_[i].TimeAt(x);
}

double Trajectory::DistanceAtTime(double t) const {
  Require(!segments_.empty(), ErrorCode::kInvalidArgument, "trajectory is empty");
  t = std::clamp(t, 0.0, duration());
  auto it = std::upper_bound(start_t_.begin(), start_t_.end(), t);
  std::size_t i = it == start_t_.begin() ? 0 : static_cast<std::size_t>(it - start_t_.begin()) - 1;
  return start_s_[i] + segments_[i].DistanceAt(t - start_t_[i]);
}

Trajectory Trajectory::Slice(double s0, double s1) const {
  Trajectory out(v_max_, a_max_);
  if (segments_.empty()) return out;
  s0 = std::clamp(s0, 0.0, length());
  s1 = std::clamp(s1, s0, length());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double a = std::max(s0, start_s_[i]);
    const double b = std::min(s1, start_s_[i] + segments_[i].length());
    if (b - a <= kMinSegment) continue;
    const TrajectorySegment& seg = segments_[i];
    Trajectory one(v_max_, a_max_);
    one.segments_.emplace_back(seg.PointAt(a - start_s_[i]), seg.PointAt(b - start_s_[i]), seg.SpeedAt(a - start_s_[i]),
                               seg.SpeedAt(b - start_s_[i]), v_max_, a_max_);
    one.start_s_ = {0.0};
    one.start_t_ = {0.0};
    out.Append(one);
  }
  return out;
}

Trajectory Trajectory::BrakeFrom(double s) const {
  const double v = segments_.empty() ? 0.0 : SpeedAtDistance(s);
  Trajectory sliced = Slice(s, s + v * v / (2.0 * a_max_));
  if (sliced.empty()) return sliced;
  // Rebuild with the braking profile: speed v at the start, rest at the end.
  std::vector<Eigen::Vector3d> pts{sliced.start()};
  for (const TrajectorySegment& seg : sliced.segments_) pts.push_back(seg.to());
  Trajectory out(v_max_, a_max_);
  double remaining = sliced.length();
  double speed = v;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double l = (pts[i + 1] - pts[i]).norm();
    remaining -= l;
    const double next = std::sqrt(std::max(0.0, 2.0 * a_max_ * remaining));
    Trajectory one(v_max_, a_max_);
    one.segments_.emplace_back(pts[i], pts[i + 1], speed, i + 2 == pts.size() ? 0.0 : next, v_max_, a_max_);
    one.start_s_ = {0.0};
    one.start_t_ = {0.0};
    out.Append(one);
    speed = next;
  }
  return out;
}

void Trajectory::Append(const Trajectory& other) {
  for (const TrajectorySegment& seg : other.segments_) {
    const double s = length();
    const double t = duration();
    segments_.push_back(seg);
    start_s_.push_back(s);
    start_t_.push_back(t);
  }
}

std::vector<Waypoint> Trajectory::Waypoints() const {
  std::vector<Waypoint> out;
  if (segments_.empty()) return out;
  out.push_back({segments_.front().from(), 0.0, segments_.front().v_start()});
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    out.push_back({segments_[i].to(), start_t_[i] + segments_[i].duration(), segments_[i].v_end()});
  }
  return out;
}

}  // namespace occpred
