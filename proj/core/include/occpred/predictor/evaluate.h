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

#ifndef OCCPRED_PREDICTOR_EVALUATE_H_
#define OCCPRED_PREDICTOR_EVALUATE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "occpred/occlusion/occlusion.h"
#include "occpred/predictor/predictor.h"

namespace occpred {

struct PairCounts {
  std::string id;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  std::int64_t evaluated = 0;
};

// Occupied-class metrics over the missing cells (unknown in the partial map,
// known in the target), micro-averaged over all pairs.
struct EvalReport {
  std::string predictor;
  double threshold = kDefaultOccupancyThreshold;
  std::optional<double> precision;  // empty when TP + FP = 0
  std::optional<double> recall;     // empty when TP + FN = 0
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  std::int64_t cells = 0;
  std::vector<PairCounts> pairs;
  double mean_inference_ms = 0.0;  // wall clock; not reproducible

  std::optional<double> F1() const;
};

// Counts for one prediction; `prediction` must share the pair's geometry.
PairCounts CountMissingCells(const DataPair& pair, const OccupancyGrid& prediction, double threshold);

using PredictorProvider = std::function<std::shared_ptr<const Predictor>(const DataPair&)>;

// Throws kUndefinedMetrics when no cell is evaluated and kInvalidArgument for
// an empty pair list.
EvalReport Evaluate(const std::vector<DataPair>& pairs, const PredictorProvider& provider,
                    double threshold = kDefaultOccupancyThreshold);
EvalReport Evaluate(const std::vector<DataPair>& pairs, const Predictor& predictor,
                    double threshold = kDefaultOccupancyThreshold);

// Provider returning an OraclePredictor over each pair's own target.
PredictorProvider OracleProvider();

// `include_timing` adds the wall-clock field, which varies between runs.
nlohmann::json ToJson(const EvalReport& report, bool include_timing = true);

}  // namespace occpred

#endif  // OCCPRED_PREDICTOR_EVALUATE_H_
