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

#include "occpred/navmap/double_layer_map.h"

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"

namespace occpred {
namespace {

double Probability(double log_odds) { return 1.0 / (1.0 + std::exp(-log_odds)); }

template <typename Fn>
auto AsConfigError(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    Throw(ErrorCode::kConfigError, e.what());
  }
}

}  // namespace

void LogOddsParams::Validate() const {
  Require(l_hit > 0.0 && l_free < 0.0, ErrorCode::kInvalidArgument, "log-odds: need l_hit > 0 and l_free < 0");
  Require(l_min < 0.0 && l_max > 0.0, ErrorCode::kInvalidArgument, "log-odds: need l_min < 0 < l_max");
}

void FusionParams::Validate() const {
  Require(lambda_o >= 0.0 && lambda_p >= 0.0 && std::abs(lambda_o + lambda_p - 1.0) <= 1e-9,
          ErrorCode::kInvalidArgument, "fusion: lambda_o and lambda_p must be >= 0 and sum to 1");
  Require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument, "fusion: threshold must be in (0, 1)");
  Require(prediction_smoothing >= 0.0 && prediction_smoothing < 1.0, ErrorCode::kInvalidArgument,
          "fusion: prediction_smoothing must be in [0, 1)");
}

double FusedValue(float y_o, float y_p, const FusionParams& params) {
  const bool known_o = IsKnown(y_o);
  const bool known_p = IsKnown(y_p);
  if (known_o && known_p) return params.lambda_o * y_o + params.lambda_p * y_p;
  if (known_o) return y_o;
  if (known_p) return y_p;
  return 0.0;
}

DoubleLayerMap::DoubleLayerMap(const GridGeometry& geometry, const LogOddsParams& log_odds)
    : log_odds_params_(log_odds),
      original_(geometry),
      predicted_(geometry),
      log_odds_(static_cast<std::size_t>(geometry.cell_count()), 0.0f) {
  log_odds.Validate();
}

void DoubleLayerMap::UpdateOriginal(std::span<const Observation> observations) {
  const GridGeometry& g = geometry();
  for (const Observation& o : observations) {
    if (!g.Contains(o.index)) Throw(ErrorCode::kInvalidArgument, "observation outside the map: " + ToString(o.index));
  }
  auto cells = original_.cells();
  const LogOddsParams& p = log_odds_params_;
  for (const Observation& o : observations) {
    const auto lin = static_cast<std::size_t>(g.Linear(o.index));
    const double prior = IsUnknown(cells[lin]) ? 0.0 : log_odds_[lin];
    const double l = std::clamp(prior + (o.hit ? p.l_hit : p.l_free), p.l_min, p.l_max);
    log_odds_[lin] = static_cast<float>(l);
    cells[lin] = static_cast<float>(Probability(l));
  }
  if (!observations.empty()) ++original_version_;
}

void DoubleLayerMap::WritePrediction(const Region& region, const OccupancyGrid& block, double smoothing) {
  Require(block.dims() == region.dims, ErrorCode::kInvalidArgument, "prediction block does not match its region");
  Require(smoothing >= 0.0 && smoothing < 1.0, ErrorCode::kInvalidArgument, "smoothing must be in [0, 1)");
  if (smoothing == 0.0) {
    WriteBlock(predicted_, region, block);
  } else {
    OccupancyGrid merged = ExtractBlock(predicted_, region);
    auto old_cells = merged.cells();
    auto new_cells = block.cells();
    for (std::size_t i = 0; i < old_cells.size(); ++i) {
      if (IsUnknown(new_cells[i])) {
        old_cells[i] = kUnknown;
      } else if (IsUnknown(old_cells[i])) {
        old_cells[i] = new_cells[i];
      } else {
        old_cells[i] = static_cast<float>(smoothing * old_cells[i] + (1.0 - smoothing) * new_cells[i]);
      }
    }
    WriteBlock(predicted_, region, merged);
  }
  ++predicted_version_;
}

double DoubleLayerMap::Fused(const GridIndex& index, const FusionParams& params) const {
  if (!geometry().Contains(index)) Throw(ErrorCode::kInvalidArgument, "query outside the map: " + ToString(index));
  return FusedValue(original_.at(index), predicted_.at(index), params);
}

bool DoubleLayerMap::QueryOccupied(const GridIndex& index, const FusionParams& params) const {
  return Fused(index, params) > params.threshold;
}

bool RefreshPrediction(DoubleLayerMap& map, const Predictor& predictor, const Eigen::Vector3d& robot,
                       const GridDims& block_dims, const FusionParams& fusion) {
  const Region region = CenteredRegion(map.geometry(), robot, block_dims);
  const TrinaryGrid snapshot = Discretize(ExtractBlock(map.original(), region), fusion.threshold);
  try {
    map.WritePrediction(region, predictor.Predict(snapshot), fusion.prediction_smoothing);
    return true;
  } catch (const Error& e) {
    spdlog::debug("prediction skipped: {}", e.what());
    return false;
  }
}

void PredictionSchedule::Validate() const {
  Require(period >= 1, ErrorCode::kInvalidArgument, "prediction period must be >= 1");
  Require(latency >= 0, ErrorCode::kInvalidArgument, "prediction latency must be >= 0");
  Require(block_dims.x >= 1 && block_dims.y >= 1 && block_dims.z >= 1, ErrorCode::kInvalidArgument,
          "prediction block dims must be >= 1");
}

PredictionScheduler::PredictionScheduler(const PredictionSchedule& schedule, const Predictor* predictor,
                                         const FusionParams& fusion)
    : schedule_(schedule), predictor_(predictor), fusion_(fusion) {
  schedule.Validate();
  fusion.Validate();
  Require(predictor != nullptr, ErrorCode::kInvalidArgument, "prediction scheduler needs a predictor");
}

void PredictionScheduler::Step(std::int64_t step, DoubleLayerMap& map, const Eigen::Vector3d& robot) {
  if (step % schedule_.period == 0) {
    const Region region = CenteredRegion(map.geometry(), robot, schedule_.block_dims);
    pending_.push_back({step + schedule_.latency, region,
                        Discretize(ExtractBlock(map.original(), region), fusion_.threshold)});
  }
  while (!pending_.empty() && pending_.front().due_step <= step) {
    const Capture capture = std::move(pending_.front());
    pending_.pop_front();
    try {
      map.WritePrediction(capture.region, predictor_->Predict(capture.snapshot), fusion_.prediction_smoothing);
      ++refreshed_;
    } catch (const Error& e) {
      ++skipped_;
      spdlog::debug("prediction skipped at step {}: {}", step, e.what());
    }
  }
}

nlohmann::json ToJson(const LogOddsParams& p) {
  return {{"l_hit", p.l_hit}, {"l_free", p.l_free}, {"l_min", p.l_min}, {"l_max", p.l_max}};
}

nlohmann::json ToJson(const FusionParams& p) {
  return {{"lambda_o", p.lambda_o},
          {"lambda_p", p.lambda_p},
          {"threshold", p.threshold},
          {"prediction_smoothing", p.prediction_smoothing}};
}

nlohmann::json ToJson(const PredictionSchedule& s) {
  return {{"period", s.period},
          {"latency", s.latency},
          {"block_dims", {s.block_dims.x, s.block_dims.y, s.block_dims.z}}};
}

LogOddsParams LogOddsParamsFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"l_hit", "l_free", "l_min", "l_max"}, "log_odds");
  LogOddsParams p;
  ReadOptional(json, "l_hit", p.l_hit);
  ReadOptional(json, "l_free", p.l_free);
  ReadOptional(json, "l_min", p.l_min);
  ReadOptional(json, "l_max", p.l_max);
  AsConfigError([&] { p.Validate(); return 0; });
  return p;
}

FusionParams FusionParamsFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"lambda_o", "lambda_p", "threshold", "prediction_smoothing"}, "fusion");
  FusionParams p;
  ReadOptional(json, "lambda_o", p.lambda_o);
  p.lambda_p = 1.0 - p.lambda_o;
  ReadOptional(json, "lambda_p", p.lambda_p);
  ReadOptional(json, "threshold", p.threshold);
  ReadOptional(json, "prediction_smoothing", p.prediction_smoothing);
  AsConfigError([&] { p.Validate(); return 0; });
  return p;
}

PredictionSchedule PredictionScheduleFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"period", "latency", "block_dims"}, "prediction");
  PredictionSchedule s;
  ReadOptional(json, "period", s.period);
  ReadOptional(json, "latency", s.latency);
  if (json.contains("block_dims")) {
    std::vector<int> d;
    ReadOptional(json, "block_dims", d);
    Require(d.size() == 3, ErrorCode::kConfigError, "prediction.block_dims must have three entries");
    s.block_dims = {d[0], d[1], d[2]};
  }
  AsConfigError([&] { s.Validate(); return 0; });
  return s;
}

}  // namespace occpred
