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

#ifndef OCCPRED_PREDICTOR_TRAINER_H_
#define OCCPRED_PREDICTOR_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "occpred/nn/adam.h"
#include "occpred/nn/loss.h"
#include "occpred/occlusion/occlusion.h"
#include "occpred/predictor/opnet.h"

namespace occpred {

// Network input, supervision target and per-cell loss weights of one pair.
struct TrainingExample {
  std::string id;
  TrinaryGrid input;
  TrinaryGrid target;
  nn::WeightGrid weights;
};

TrainingExample MakeExample(const DataPair& pair, const nn::LossWeightParams& loss,
                            double threshold = kDefaultOccupancyThreshold);

struct TrainOptions {
  int epochs = 6;
  int batch_size = 2;
  nn::LrSchedule lr;
  nn::LossWeightParams loss;
  std::uint64_t seed = 11;  // epoch order
  double threshold = kDefaultOccupancyThreshold;
  std::filesystem::path checkpoint;  // best-validation weights; empty to skip writing

  void Validate() const;
};

nlohmann::json ToJson(const TrainOptions& options);
TrainOptions TrainOptionsFromJson(const nlohmann::json& json);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;  // mean over the epoch's steps
  std::optional<double> val_precision;
  std::optional<double> val_recall;
  std::optional<double> val_f1;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  std::vector<double> step_losses;
  int best_epoch = -1;
};

// One optimizer step on a batch: forward, weighted loss, backward, Adam.
// Returns the batch loss before the update.
double TrainStep(OPNetModel& model, const std::vector<const TrainingExample*>& batch, nn::AdamState& adam,
                 double lr);

// Seeded per-epoch shuffle, validation after each epoch, best epoch chosen by
// validation F1 (first epoch wins ties; the last epoch when validation is
// empty or undefined throughout). On return the model holds the best weights
// as stored in the checkpoint. Throws kInvalidArgument for an empty training set.
TrainingLog Train(OPNetModel& model, const std::vector<TrainingExample>& train,
                  const std::vector<DataPair>& validation, const TrainOptions& options);

// "epoch,train_loss,val_precision,val_recall,val_f1"; undefined metrics are empty.
std::string TrainingLogCsv(const TrainingLog& log);

}  // namespace occpred

#endif  // OCCPRED_PREDICTOR_TRAINER_H_
