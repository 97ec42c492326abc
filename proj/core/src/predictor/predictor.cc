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

#include "occpred/predictor/predictor.h"

#include <cmath>

#include "occpred/common/error.h"

namespace occpred {
namespace {

OccupancyGrid Filled(const TrinaryGrid& block, float value) {
  OccupancyGrid out(block.geometry());
  for (float& v : out.cells()) v = value;
  return out;
}

}  // namespace

const char* ToString(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kOracle:
      return "ORACLE";
    case BaselineKind::kAllFree:
      return "ALL_FREE";
    case BaselineKind::kAllOccupied:
      return "ALL_OCCUPIED";
    case BaselineKind::kPassthrough:
      return "PASSTHROUGH";
  }
  return "UNKNOWN";
}

BaselineKind BaselineKindFromString(const std::string& name) {
  for (BaselineKind k : {BaselineKind::kOracle, BaselineKind::kAllFree, BaselineKind::kAllOccupied,
                         BaselineKind::kPassthrough}) {
    if (name == ToString(k)) return k;
  }
  Throw(ErrorCode::kInvalidArgument, "unknown baseline '" + name + "'");
}

OraclePredictor::OraclePredictor(OccupancyGrid ground_truth, double threshold)
    : truth_(std::move(ground_truth)), threshold_(threshold) {}

OccupancyGrid OraclePredictor::Predict(const TrinaryGrid& block) const {
  const GridGeometry& g = block.geometry();
  const GridGeometry& t = truth_.geometry();
  Require(std::abs(g.resolution() - t.resolution()) <= 1e-9 * t.resolution(), ErrorCode::kInvalidArgument,
          "oracle: block resolution differs from the ground truth");
  const Eigen::Vector3d shift = (g.origin() - t.origin()) / t.resolution();
  const Eigen::Vector3d rounded = shift.array().round();
  Require((shift - rounded).cwiseAbs().maxCoeff() < 1e-6, ErrorCode::kInvalidArgument,
          "oracle: block origin is not aligned with the ground-truth cells");
  const GridIndex offset{static_cast<int>(rounded.x()), static_cast<int>(rounded.y()), static_cast<int>(rounded.z())};
  OccupancyGrid out(g);
  const GridDims& d = g.dims();
  for (int i = 0; i < d.x; ++i) {
    for (int j = 0; j < d.y; ++j) {
      for (int k = 0; k < d.z; ++k) {
        const GridIndex src{i + offset.i, j + offset.j, k + offset.k};
        float value = 0.0f;
        if (t.Contains(src)) value = DiscretizeValue(truth_.at(src), threshold_) == 1 ? 1.0f : 0.0f;
        out.cells()[static_cast<std::size_t>(g.Linear({i, j, k}))] = value;
      }
    }
  }
  return out;
}

OccupancyGrid AllFreePredictor::Predict(const TrinaryGrid& block) const { return Filled(block, 0.0f); }

OccupancyGrid AllOccupiedPredictor::Predict(const TrinaryGrid& block) const { return Filled(block, 1.0f); }

OccupancyGrid PassthroughPredictor::Predict(const TrinaryGrid& block) const {
  OccupancyGrid out(block.geometry());
  auto in = block.cells();
  auto dst = out.cells();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = in[i] == 1 ? 1.0f : 0.0f;
  return out;
}

OccupancyGrid FailingPredictor::Predict(const TrinaryGrid&) const {
  Throw(ErrorCode::kPredictionFailed, "predictor configured to fail");
}

std::unique_ptr<Predictor> MakeBaseline(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kAllFree:
      return std::make_unique<AllFreePredictor>();
    case BaselineKind::kAllOccupied:
      return std::make_unique<AllOccupiedPredictor>();
    case BaselineKind::kPassthrough:
      return std::make_unique<PassthroughPredictor>();
    case BaselineKind::kOracle:
      break;
  }
  Throw(ErrorCode::kInvalidArgument, "ORACLE needs a ground-truth grid");
}

}  // namespace occpred
