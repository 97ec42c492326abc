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

#include "occpred/common/error.h"

namespace occpred {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kUndefinedRatio: return "undefined-ratio";
    case ErrorCode::kGenerationFailed: return "generation-failed";
    case ErrorCode::kPathSamplingFailed: return "path-sampling-failed";
    case ErrorCode::kOcclusionGenerationFailed: return "occlusion-generation-failed";
    case ErrorCode::kNumericDegenerate: return "numeric-degenerate";
    case ErrorCode::kPlanFailed: return "plan-failed";
    case ErrorCode::kInvalidStart: return "invalid-start";
    case ErrorCode::kUndefinedMetrics: return "undefined-metrics";
    case ErrorCode::kPredictionFailed: return "prediction-failed";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kConfigError: return "config-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message), code_(code) {}

void Throw(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace occpred
