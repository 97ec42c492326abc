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

#ifndef OCCPRED_NAVMAP_DOUBLE_LAYER_MAP_H_
#define OCCPRED_NAVMAP_DOUBLE_LAYER_MAP_H_

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "occpred/predictor/predictor.h"
#include "occpred/voxel/grid.h"

namespace occpred {

// Log-odds occupancy update for the original layer. The prior is 0 (p = 0.5);
// an unknown cell starts from the prior on its first observation.
struct LogOddsParams {
  double l_hit = 0.85;
  double l_free = -0.4;
  double l_min = -3.5;
  double l_max = 3.5;
  void Validate() const;
};

struct FusionParams {
  double lambda_o = 0.8;
  double lambda_p = 0.2;  // lambda_o + lambda_p = 1
  double threshold = 0.5;
  // Optional exponential smoothing of predicted-layer writes:
  // new = smoothing * old + (1 - smoothing) * prediction where old is known.
  // 0 disables it (plain overwrite).
  double prediction_smoothing = 0.0;
  void Validate() const;
};

// Both known: weighted sum. Both unknown: 0 (optimistic). Exactly one known:
// that value.
double FusedValue(float y_o, float y_p, const FusionParams& params);

struct Observation {
  GridIndex index;
  bool hit = false;
};

// Original layer (sensor fused) and predicted layer over one geometry. Both
// start all-unknown.
class DoubleLayerMap {
 public:
  explicit DoubleLayerMap(const GridGeometry& geometry, const LogOddsParams& log_odds = {});

  const GridGeometry& geometry() const { return original_.geometry(); }
  const OccupancyGrid& original() const { return original_; }
  const OccupancyGrid& predicted() const { return predicted_; }
  std::uint64_t original_version() const { return original_version_; }
  std::uint64_t predicted_version() const { return predicted_version_; }

  // Applies each observation in order. Throws kInvalidArgument for an index
  // outside the grid (before any cell is modified).
  void UpdateOriginal(std::span<const Observation> observations);

  // Writes `block` into `region` of the predicted layer. Throws
  // kInvalidArgument when the block does not match the region.
  void WritePrediction(const Region& region, const OccupancyGrid& block, double smoothing = 0.0);

  // Throws kInvalidArgument for an index outside the grid.
  double Fused(const GridIndex& index, const FusionParams& params) const;
  bool QueryOccupied(const GridIndex& index, const FusionParams& params) const;

 private:
  LogOddsParams log_odds_params_;
  OccupancyGrid original_;
  OccupancyGrid predicted_;
  std::vector<float> log_odds_;
  std::uint64_t original_version_ = 0;
  std::uint64_t predicted_version_ = 0;
};

// Captures the original layer around the robot, discretizes it, runs the
// predictor and writes the result into the predicted layer. Returns false
// (predicted layer untouched, logged) when the predictor throws.
bool RefreshPrediction(DoubleLayerMap& map, const Predictor& predictor, const Eigen::Vector3d& robot,
                       const GridDims& block_dims, const FusionParams& fusion = {});

struct PredictionSchedule {
  int period = 10;   // steps between captures
  int latency = 0;   // steps between capture and write-back
  GridDims block_dims{40, 40, 20};
  void Validate() const;
};

// Deterministic model of the asynchronous prediction path: at every step
// divisible by `period` a block of the original layer is captured around the
// robot; `latency` steps later the prediction of that snapshot is written to
// the predicted layer.
class PredictionScheduler {
 public:
  PredictionScheduler(const PredictionSchedule& schedule, const Predictor* predictor, const FusionParams& fusion = {});

  // Call once per simulation step, after the original layer update.
  void Step(std::int64_t step, DoubleLayerMap& map, const Eigen::Vector3d& robot);

  int refreshed() const { return refreshed_; }
  int skipped() const { return skipped_; }
  std::size_t pending() const { return pending_.size(); }

 private:
  struct Capture {
    std::int64_t due_step;
    Region region;
    TrinaryGrid snapshot;
  };

  PredictionSchedule schedule_;
  const Predictor* predictor_;
  FusionParams fusion_;
  std::deque<Capture> pending_;
  int refreshed_ = 0;
  int skipped_ = 0;
};

nlohmann::json ToJson(const LogOddsParams& params);
nlohmann::json ToJson(const FusionParams& params);
nlohmann::json ToJson(const PredictionSchedule& schedule);
LogOddsParams LogOddsParamsFromJson(const nlohmann::json& json);
FusionParams FusionParamsFromJson(const nlohmann::json& json);
PredictionSchedule PredictionScheduleFromJson(const nlohmann::json& json);

}  // namespace occpred

#endif  // OCCPRED_NAVMAP_DOUBLE_LAYER_MAP_H_
