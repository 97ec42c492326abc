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

#include "occpred/predictor/trainer.h"

#include <numeric>
#include <spdlog/spdlog.h>
#include <sstream>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/common/rng.h"
#include "occpred/nn/weights_io.h"
#include "occpred/predictor/evaluate.h"

namespace occpred {
namespace {

OPNetModel RoundTrip(const OPNetModel& model) {
  return OPNetModel::FromLayers(nn::DecodeWeights(nn::EncodeWeights(model.layers())), model.config().block_dims);
}

}  // namespace

TrainingExample MakeExample(const DataPair& pair, const nn::LossWeightParams& loss, double threshold) {
  TrainingExample e;
  e.id = pair.id;
  e.input = Discretize(pair.partial, threshold);
  e.target = Discretize(pair.target, threshold);
  e.weights = nn::LossWeights(e.target, e.input, loss);
  return e;
}

void TrainOptions::Validate() const {
  Require(epochs >= 1, ErrorCode::kInvalidArgument, "train: epochs must be >= 1");
  Require(batch_size >= 1, ErrorCode::kInvalidArgument, "train: batch_size must be >= 1");
  Require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument, "train: threshold must be in (0, 1)");
  Require(loss.missing >= 0.0 && loss.occupied >= 0.0 && loss.free >= 0.0, ErrorCode::kInvalidArgument,
          "train: loss weights must be >= 0");
  lr.Validate();
}

nlohmann::json ToJson(const TrainOptions& o) {
  nlohmann::json schedule = nlohmann::json::array();
  for (const auto& [step, rate] : o.lr.steps) schedule.push_back({step, rate});
  return {{"epochs", o.epochs},
          {"batch_size", o.batch_size},
          {"lr_schedule", schedule},
          {"loss_weights", {{"missing", o.loss.missing}, {"occupied", o.loss.occupied}, {"free", o.loss.free}}},
          {"seed", o.seed},
          {"threshold", o.threshold}};
}

TrainOptions TrainOptionsFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"epochs", "batch_size", "lr_schedule", "loss_weights", "seed", "threshold"}, "training");
  TrainOptions o;
  ReadOptional(json, "epochs", o.epochs);
  ReadOptional(json, "batch_size", o.batch_size);
  ReadOptional(json, "seed", o.seed);
  ReadOptional(json, "threshold", o.threshold);
  if (json.contains("lr_schedule")) {
    ReadOptional(json, "lr_schedule", o.lr.steps);
  }
  if (json.contains("loss_weights")) {
    const auto& w = json.at("loss_weights");
    RejectUnknownKeys(w, {"missing", "occupied", "free"}, "training.loss_weights");
    ReadOptional(w, "missing", o.loss.missing);
    ReadOptional(w, "occupied", o.loss.occupied);
    ReadOptional(w, "free", o.loss.free);
  }
  try {
    o.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return o;
}

double TrainStep(OPNetModel& model, const std::vector<const TrainingExample*>& batch, nn::AdamState& adam,
                 double lr) {
  Require(!batch.empty(), ErrorCode::kInvalidArgument, "train step: empty batch");
  std::vector<const TrinaryGrid*> inputs;
  std::vector<std::int8_t> targets;
  std::vector<double> weights;
  for (const TrainingExample* e : batch) {
    inputs.push_back(&e->input);
    targets.insert(targets.end(), e->target.cells().begin(), e->target.cells().end());
    weights.insert(weights.end(), e->weights.weights.begin(), e->weights.weights.end());
  }
  const nn::Tensor probs = model.TrainForward(EncodeBlocks(inputs));
  const nn::LossResult loss = nn::WeightedBce(probs.data(), targets, weights);
  nn::Tensor grad(probs.shape());
  std::copy(loss.grad.begin(), loss.grad.end(), grad.data().begin());
  model.ZeroGrad();
  model.Backward(grad);
  nn::AdamStep(model.Parameters(), adam, lr);
  return loss.loss;
}

TrainingLog Train(OPNetModel& model, const std::vector<TrainingExample>& train, const std::vector<DataPair>& validation,
                  const TrainOptions& options) {
  options.Validate();
  Require(!train.empty(), ErrorCode::kInvalidArgument, "train: empty training set");
  TrainingLog log;
  nn::AdamState adam;
  std::int64_t step = 0;
  std::optional<OPNetModel> best;
  double best_f1 = -1.0;
  std::vector<std::size_t> order(train.size());
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(epoch)));
    rng.Shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    int steps = 0;
    for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(options.batch_size)) {
      std::vector<const TrainingExample*> batch;
      for (std::size_t j = i; j < std::min(order.size(), i + static_cast<std::size_t>(options.batch_size)); ++j) {
        batch.push_back(&train[order[j]]);
      }
      const double loss = TrainStep(model, batch, adam, options.lr.At(step));
      log.step_losses.push_back(loss);
      loss_sum += loss;
      ++steps;
      ++step;
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / steps;
    OPNetModel snapshot = RoundTrip(model);
    if (!validation.empty()) {
      try {
        const EvalReport report = Evaluate(validation, OPNetPredictor(std::make_shared<const OPNetModel>(snapshot)),
                                           options.threshold);
        entry.val_precision = report.precision;
        entry.val_recall = report.recall;
        entry.val_f1 = report.F1();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedMetrics) throw;
      }
    }
    spdlog::info("epoch {} loss {:.5f} val precision {} recall {}", epoch, entry.train_loss,
                 entry.val_precision ? std::to_string(*entry.val_precision) : "n/a",
                 entry.val_recall ? std::to_string(*entry.val_recall) : "n/a");
    const double f1 = entry.val_f1.value_or(-1.0);
    const bool last = epoch + 1 == options.epochs;
    if (f1 > best_f1 || (!best && last)) {
      best_f1 = f1;
      best = std::move(snapshot);
      log.best_epoch = epoch;
      if (!options.checkpoint.empty()) best->Save(options.checkpoint);
    }
    log.epochs.push_back(entry);
  }
  model = std::move(*best);
  return log;
}

std::string TrainingLogCsv(const TrainingLog& log) {
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream s;
    s.precision(17);
    s << *v;
    return s.str();
  };
  std::ostringstream out;
  out.precision(17);
  out << "epoch,train_loss,val_precision,val_recall,val_f1\n";
  for (const EpochLog& e : log.epochs) {
    out << e.epoch << "," << e.train_loss << "," << opt(e.val_precision) << "," << opt(e.val_recall) << ","
        << opt(e.val_f1) << "\n";
  }
  return out.str();
}

}  // namespace occpred
