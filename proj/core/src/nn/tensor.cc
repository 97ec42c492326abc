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

#include "occpred/nn/tensor.h"

#include <algorithm>
#include <sstream>

#include "occpred/common/error.h"

namespace occpred::nn {

std::string ToString(const Shape& s) {
  std::ostringstream out;
  out << "(" << s.n << "," << s.c << "," << s.d << "," << s.h << "," << s.w << ")";
  return out.str();
}

Tensor::Tensor(const Shape& shape, double fill) : shape_(shape) {
  Require(shape.n >= 0 && shape.c >= 0 && shape.d >= 0 && shape.h >= 0 && shape.w >= 0,
          ErrorCode::kInvalidArgument, "negative tensor dimension");
  data_.assign(static_cast<std::size_t>(shape.numel()), fill);
}

void Tensor::EnableGrad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
}

void Tensor::ZeroGrad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

void RequireSameShape(const Shape& a, const Shape& b, const char* what) {
  Require(a == b, ErrorCode::kInvalidArgument, std::string(what) + ": shape " + ToString(a) + " vs " + ToString(b));
}

}  // namespace occpred::nn
