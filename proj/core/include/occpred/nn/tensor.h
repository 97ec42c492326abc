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

#ifndef OCCPRED_NN_TENSOR_H_
#define OCCPRED_NN_TENSOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace occpred::nn {

// (N, C, D, H, W). For voxel data D, H, W map to the grid's x, y, z axes, so a
// single-channel tensor has the same memory order as an OccupancyGrid.
struct Shape {
  int n = 0;
  int c = 0;
  int d = 0;
  int h = 0;
  int w = 0;

  std::int64_t spatial() const { return static_cast<std::int64_t>(d) * h * w; }
  std::int64_t numel() const { return static_cast<std::int64_t>(n) * c * spatial(); }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string ToString(const Shape& shape);

// Dense tensor in double precision with an optional gradient buffer of the
// same shape (allocated for parameters only).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(const Shape& shape, double fill = 0.0);

  const Shape& shape() const { return shape_; }
  std::int64_t numel() const { return shape_.numel(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double* channel(int n, int c) { return data_.data() + Offset(n, c); }
  const double* channel(int n, int c) const { return data_.data() + Offset(n, c); }

  double& at(int n, int c, int d, int h, int w) { return data_[static_cast<std::size_t>(Index(n, c, d, h, w))]; }
  double at(int n, int c, int d, int h, int w) const { return data_[static_cast<std::size_t>(Index(n, c, d, h, w))]; }

  bool has_grad() const { return !grad_.empty(); }
  void EnableGrad();
  void ZeroGrad();
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }

  std::int64_t Index(int n, int c, int d, int h, int w) const {
    return (((static_cast<std::int64_t>(n) * shape_.c + c) * shape_.d + d) * shape_.h + h) * shape_.w + w;
  }

 private:
  std::int64_t Offset(int n, int c) const { return (static_cast<std::int64_t>(n) * shape_.c + c) * shape_.spatial(); }

  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

// Throws kInvalidArgument with `what` when the shapes differ.
void RequireSameShape(const Shape& a, const Shape& b, const char* what);

}  // namespace occpred::nn

#endif  // OCCPRED_NN_TENSOR_H_
