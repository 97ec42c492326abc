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

#ifndef OCCPRED_COMMON_ERROR_H_
#define OCCPRED_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace occpred {

// Every failure raised by the library carries one of these codes so callers
// (and the CLI exit-code mapping) can dispatch without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  kOutOfBounds,
  kUndefinedRatio,
  kGenerationFailed,
  kPathSamplingFailed,
  kOcclusionGenerationFailed,
  kNumericDegenerate,
  kPlanFailed,
  kInvalidStart,
  kUndefinedMetrics,
  kPredictionFailed,
  kIoError,
  kConfigError,
};

std::string_view ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Throw(ErrorCode code, const std::string& message);

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Throw(code, message);
}

}  // namespace occpred

#endif  // OCCPRED_COMMON_ERROR_H_
