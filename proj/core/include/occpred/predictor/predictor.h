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

#ifndef OCCPRED_PREDICTOR_PREDICTOR_H_
#define OCCPRED_PREDICTOR_PREDICTOR_H_

#include <memory>
#include <string>

#include "occpred/voxel/grid.h"

namespace occpred {

// Maps a trinary block (-1 unknown, 0 free, 1 occupied) to per-cell
// occupancy probabilities with the same geometry. Implementations must be
// safe to call concurrently on a shared instance.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  virtual OccupancyGrid Predict(const TrinaryGrid& block) const = 0;
};

enum class BaselineKind { kOracle, kAllFree, kAllOccupied, kPassthrough };

const char* ToString(BaselineKind kind);
// Accepts "ORACLE", "ALL_FREE", "ALL_OCCUPIED", "PASSTHROUGH".
BaselineKind BaselineKindFromString(const std::string& name);

// Ground-truth lookup. Cells of the block are matched to the ground-truth
// grid by position (same resolution, cell-aligned origin); ground-truth
// occupied -> 1, free, unknown or outside -> 0.
class OraclePredictor final : public Predictor {
 public:
  explicit OraclePredictor(OccupancyGrid ground_truth, double threshold = kDefaultOccupancyThreshold);
  std::string name() const override { return "ORACLE"; }
  OccupancyGrid Predict(const TrinaryGrid& block) const override;

 private:
  OccupancyGrid truth_;
  double threshold_;
};

// Every cell free.
class AllFreePredictor final : public Predictor {
 public:
  std::string name() const override { return "ALL_FREE"; }
  OccupancyGrid Predict(const TrinaryGrid& block) const override;
};

// Every cell occupied.
class AllOccupiedPredictor final : public Predictor {
 public:
  std::string name() const override { return "ALL_OCCUPIED"; }
  OccupancyGrid Predict(const TrinaryGrid& block) const override;
};

// Observed cells keep their trinary value, unknown cells become free.
class PassthroughPredictor final : public Predictor {
 public:
  std::string name() const override { return "PASSTHROUGH"; }
  OccupancyGrid Predict(const TrinaryGrid& block) const override;
};

// Always throws kPredictionFailed; exercises the prediction-skipped path.
class FailingPredictor final : public Predictor {
 public:
  std::string name() const override { return "FAILING"; }
  OccupancyGrid Predict(const TrinaryGrid& block) const override;
};

// Baselines other than ORACLE; ORACLE needs a ground truth and is built
// directly. Throws kInvalidArgument for kOracle.
std::unique_ptr<Predictor> MakeBaseline(BaselineKind kind);

}  // namespace occpred

#endif  // OCCPRED_PREDICTOR_PREDICTOR_H_
