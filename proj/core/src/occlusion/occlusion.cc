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

#include "occpred/occlusion/occlusion.h"

#include <algorithm>
#include <cmath>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/voxel/inflate.h"
#include "occpred/voxel/raycast.h"

namespace occpred {

void OcclusionParams::Validate() const {
  Require(t_max >= 1, ErrorCode::kInvalidArgument, "t_max must be >= 1");
  Require(scan_interval > 0.0, ErrorCode::kInvalidArgument, "scan_interval must be > 0");
  Require(rays_per_scan >= 1, ErrorCode::kInvalidArgument, "rays_per_scan must be >= 1");
  Require(scan_max_range > 0.0, ErrorCode::kInvalidArgument, "scan_max_range must be > 0");
  Require(r_min > 0.0 && r_min < r_max && r_max <= 1.0, ErrorCode::kInvalidArgument,
          "ratio bounds must satisfy 0 < r_min < r_max <= 1");
  Require(robot_radius >= 0.0, ErrorCode::kInvalidArgument, "robot_radius must be >= 0");
  Require(path_retries >= 1, ErrorCode::kInvalidArgument, "path_retries must be >= 1");
  Require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument, "threshold must be in (0,1)");
}

void NoiseParams::Validate() const {
  Require(gaussian_sigma >= 0.0, ErrorCode::kInvalidArgument, "gaussian_sigma must be >= 0");
  Require(pepper_rate >= 0.0 && pepper_rate <= 1.0, ErrorCode::kInvalidArgument, "pepper_rate must be in [0,1]");
}

nlohmann::json ToJson(const OcclusionParams& p) {
  return {{"t_max", p.t_max},
          {"scan_interval", p.scan_interval},
          {"rays_per_scan", p.rays_per_scan},
          {"scan_max_range", p.scan_max_range},
          {"r_min", p.r_min},
          {"r_max", p.r_max},
          {"robot_radius", p.robot_radius},
          {"path_retries", p.path_retries},
          {"threshold", p.threshold}};
}

nlohmann::json ToJson(const NoiseParams& p) {
  return {{"gaussian_sigma", p.gaussian_sigma}, {"pepper_rate", p.pepper_rate}, {"seed", p.seed}};
}

OcclusionParams OcclusionParamsFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json,
                    {"t_max", "scan_interval", "rays_per_scan", "scan_max_range", "r_min", "r_max", "robot_radius",
                     "path_retries", "threshold"},
                    "occlusion");
  OcclusionParams p;
  ReadOptional(json, "t_max", p.t_max);
  ReadOptional(json, "scan_interval", p.scan_interval);
  ReadOptional(json, "rays_per_scan", p.rays_per_scan);
  ReadOptional(json, "scan_max_range", p.scan_max_range);
  ReadOptional(json, "r_min", p.r_min);
  ReadOptional(json, "r_max", p.r_max);
  ReadOptional(json, "robot_radius", p.robot_radius);
  ReadOptional(json, "path_retries", p.path_retries);
  ReadOptional(json, "threshold", p.threshold);
  try {
    p.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return p;
}

NoiseParams NoiseParamsFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"gaussian_sigma", "pepper_rate", "seed"}, "noise");
  NoiseParams p;
  ReadOptional(json, "gaussian_sigma", p.gaussian_sigma);
  ReadOptional(json, "pepper_rate", p.pepper_rate);
  ReadOptional(json, "seed", p.seed);
  try {
    p.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return p;
}

std::vector<Eigen::Vector3d> ScanPointsAlong(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                                             double interval) {
  Require(interval > 0.0, ErrorCode::kInvalidArgument, "scan interval must be > 0");
  const Eigen::Vector3d delta = to - from;
  const double length = delta.norm();
  std::vector<Eigen::Vector3d> points;
  if (length <= 0.0) return {from};
  const Eigen::Vector3d dir = delta / length;
  for (int k = 0; k * interval < length - 1e-9; ++k) points.push_back(from + dir * (k * interval));
  points.push_back(to);
  return points;
}

bool SegmentIsClear(const OccupancyGrid& target, const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                    double radius, double threshold) {
  const GridGeometry& g = target.geometry();
  if (!g.Contains(from) || !g.Contains(to)) return false;
  const auto offsets = SphereOffsets(radius, g.resolution());
  const double length = (to - from).norm();
  const int samples = std::max(1, static_cast<int>(std::ceil(length / (0.5 * g.resolution()))));
  GridIndex last{-1, -1, -1};
  for (int s = 0; s <= samples; ++s) {
    const Eigen::Vector3d p = from + (to - from) * (static_cast<double>(s) / samples);
    const GridIndex c = g.WorldToIndex(p);
    if (c == last) continue;
    last = c;
    for (const auto& o : offsets) {
      const GridIndex q{c.i + o.i, c.j + o.j, c.k + o.k};
      if (!g.Contains(q)) return false;
      const float v = target.at(q);
      if (IsUnknown(v) || v > threshold) return false;
    }
  }
  return true;
}

std::vector<Eigen::Vector3d> SampleVirtualPath(const OccupancyGrid& target, const OcclusionParams& params,
                                               Rng& rng) {
  const GridGeometry& g = target.geometry();
  std::vector<std::int64_t> free_cells;
  const auto cells = target.cells();
  for (std::int64_t n = 0; n < g.cell_count(); ++n) {
    const float v = cells[static_cast<std::size_t>(n)];
    if (IsKnown(v) && v <= params.threshold) free_cells.push_back(n);
  }
  Require(!free_cells.empty(), ErrorCode::kPathSamplingFailed, "target has no free cells");
  auto draw = [&] {
    const auto n = free_cells[static_cast<std::size_t>(rng.Below(free_cells.size()))];
    return g.IndexToWorld(g.Unlinear(n));
  };
  for (int attempt = 0; attempt < params.path_retries; ++attempt) {
    const Eigen::Vector3d start = draw();
    const Eigen::Vector3d goal = draw();
    if (SegmentIsClear(target, start, goal, params.robot_radius, params.threshold)) {
      return ScanPointsAlong(start, goal, params.scan_interval);
    }
  }
  Throw(ErrorCode::kPathSamplingFailed, "no collision-free segment within the retry budget");
}

OccupancyGrid SimulateObservation(const OccupancyGrid& target, const Eigen::Vector3d& scan_point,
                                  const OcclusionParams& params, std::span<const Eigen::Vector3d> directions) {
  Require(target.geometry().Contains(scan_point), ErrorCode::kInvalidArgument, "scan point outside grid");
  const float here = target.at(target.geometry().WorldToIndex(scan_point));
  Require(!(IsKnown(here) && here > params.threshold), ErrorCode::kInvalidArgument, "scan point is occupied");

  OccupancyGrid scan(target.geometry());
  RayResult ray;
  for (const auto& dir : directions) {
    RaycastInto(target, scan_point, dir, params.scan_max_range, RayMode::kReverse, params.threshold, ray);
    for (const auto& c : ray.visited) scan.cells()[static_cast<std::size_t>(scan.geometry().Linear(c))] = 0.0f;
    if (ray.cause == RayStop::kHitOccupied) {
      scan.cells()[static_cast<std::size_t>(scan.geometry().Linear(*ray.terminal))] = 1.0f;
    }
  }
  return scan;
}

OccupancyGrid SimulateObservation(const OccupancyGrid& target, const Eigen::Vector3d& scan_point,
                                  const OcclusionParams& params) {
  const auto directions = FibonacciSphere(params.rays_per_scan);
  return SimulateObservation(target, scan_point, params, directions);
}

void FuseInto(OccupancyGrid& accum, const OccupancyGrid& scan) {
  Require(accum.geometry() == scan.geometry(), ErrorCode::kInvalidArgument, "fuse: geometry mismatch");
  auto dst = accum.cells();
  auto src = scan.cells();
  for (std::size_t n = 0; n < dst.size(); ++n) {
    if (IsUnknown(dst[n])) dst[n] = src[n];
  }
}

OccupancyGrid FuseMap(const OccupancyGrid& accum, const OccupancyGrid& scan) {
  OccupancyGrid out = accum;
  FuseInto(out, scan);
  return out;
}

DataPair GenerateOccludedMap(const OccupancyGrid& target, const OcclusionParams& params, Rng& rng) {
  params.Validate();
  const auto directions = FibonacciSphere(params.rays_per_scan);
  DataPair pair;
  pair.target = target;
  pair.partial = OccupancyGrid(target.geometry());
  int paths = 0;
  for (int t = 0; t < params.t_max; ++t) {
    std::vector<Eigen::Vector3d> scan_points;
    try {
      scan_points = SampleVirtualPath(target, params, rng);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPathSamplingFailed) throw;
      continue;
    }
    ++paths;
    for (const auto& p : scan_points) FuseInto(pair.partial, SimulateObservation(target, p, params, directions));
    const double ratio = KnownRatio(pair.partial, target);
    if (ratio > params.r_min && ratio < params.r_max) {
      pair.known_ratio = ratio;
      pair.paths_used = paths;
      return pair;
    }
    // Fusing more paths can only add known cells, so an over-complete map is
    // discarded and sampling starts over.
    if (ratio >= params.r_max) {
      std::fill(pair.partial.cells().begin(), pair.partial.cells().end(), kUnknown);
      paths = 0;
    }
  }
  Throw(ErrorCode::kOcclusionGenerationFailed, "no accepted occlusion within t_max attempts");
}

OccupancyGrid AddNoise(const OccupancyGrid& grid, const NoiseParams& noise, Rng& rng) {
  noise.Validate();
  OccupancyGrid out = grid;
  for (float& v : out.cells()) {
    if (IsUnknown(v)) continue;
    if (rng.Bernoulli(noise.pepper_rate)) {
      v = static_cast<float>(rng.Uniform());
    } else {
      const double perturbed = v + noise.gaussian_sigma * rng.Normal();
      v = static_cast<float>(std::clamp(perturbed, 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace occpred
