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

#include "occpred/predictor/evaluate.h"

#include <chrono>

#include "occpred/common/error.h"

namespace occpred {

std::optional<double> EvalReport::F1() const {
  if (!precision || !recall || *precision + *recall == 0.0) return std::nullopt;
  return 2.0 * *precision * *recall / (*precision + *recall);
}

PairCounts CountMissingCells(const DataPair& pair, const OccupancyGrid& prediction, double threshold) {
  Require(pair.target.geometry() == pair.partial.geometry() && prediction.geometry() == pair.target.geometry(),
          ErrorCode::kInvalidArgument, "evaluate: target, partial and prediction geometries differ");
  PairCounts c;
  c.id = pair.id;
  auto target = pair.target.cells();
  auto partial = pair.partial.cells();
  auto pred = prediction.cells();
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!IsUnknown(partial[i]) || IsUnknown(target[i])) continue;
    const bool truth = DiscretizeValue(target[i], threshold) == 1;
    const bool positive = pred[i] > threshold;
    ++c.evaluated;
    if (truth && positive) {
      ++c.tp;
    } else if (!truth && positive) {
      ++c.fp;
    } else if (truth) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

EvalReport Evaluate(const std::vector<DataPair>& pairs, const PredictorProvider& provider, double threshold) {
  Require(!pairs.empty(), ErrorCode::kInvalidArgument, "evaluate: no pairs");
  Require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument, "evaluate: threshold must be in (0, 1)");
  EvalReport report;
  report.threshold = threshold;
  double total_ms = 0.0;
  for (const DataPair& pair : pairs) {
    std::shared_ptr<const Predictor> predictor = provider(pair);
    Require(predictor != nullptr, ErrorCode::kInvalidArgument, "evaluate: provider returned no predictor");
    report.predictor = predictor->name();
    const TrinaryGrid input = Discretize(pair.partial, threshold);
    const auto start = std::chrono::steady_clock::now();
    const OccupancyGrid prediction = predictor->Predict(input);
    total_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    PairCounts c = CountMissingCells(pair, prediction, threshold);
    report.tp += c.tp;
    report.fp += c.fp;
    report.fn += c.fn;
    report.tn += c.tn;
    report.cells += c.evaluated;
    report.pairs.push_back(std::move(c));
  }
  report.mean_inference_ms = total_ms / static_cast<double>(pairs.size());
  Require(report.cells > 0, ErrorCode::kUndefinedMetrics, "evaluate: no missing cells to evaluate");
  if (report.tp + report.fp > 0) report.precision = static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fp);
  if (report.tp + report.fn > 0) report.recall = static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fn);
  return report;
}

EvalReport Evaluate(const std::vector<DataPair>& pairs, const Predictor& predictor, double threshold) {
  // Non-owning alias: the caller keeps `predictor` alive for the call.
  std::shared_ptr<const Predictor> alias(std::shared_ptr<const Predictor>(), &predictor);
  return Evaluate(pairs, [&](const DataPair&) { return alias; }, threshold);
}

PredictorProvider OracleProvider() {
  return [](const DataPair& pair) { return std::make_shared<const OraclePredictor>(pair.target); };
}

nlohmann::json ToJson(const EvalReport& r, bool include_timing) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairCounts& c : r.pairs) {
    pairs.push_back({{"id", c.id}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}, {"evaluated", c.evaluated}});
  }
  nlohmann::json j = {{"predictor", r.predictor},
                      {"threshold", r.threshold},
                      {"precision", opt(r.precision)},
                      {"recall", opt(r.recall)},
                      {"f1", opt(r.F1())},
                      {"precision_defined", r.precision.has_value()},
                      {"recall_defined", r.recall.has_value()},
                      {"tp", r.tp},
                      {"fp", r.fp},
                      {"fn", r.fn},
                      {"tn", r.tn},
                      {"cells_evaluated", r.cells},
                      {"averaging", "micro"},
                      {"pairs", pairs}};
  if (include_timing) j["mean_inference_ms"] = r.mean_inference_ms;
  return j;
}

}  // namespace occpred
