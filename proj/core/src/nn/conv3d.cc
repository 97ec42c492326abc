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

#include "occpred/nn/conv3d.h"

#include <Eigen/Core>
#include <algorithm>
#include <vector>

#include "occpred/common/error.h"

namespace occpred::nn {
namespace {

// Output positions o in [lo, hi] whose input coordinate o * stride + offset
// lies inside [0, in). Empty when hi < lo.
struct Range {
  int lo;
  int hi;
};

Range ValidRange(int in, int out, int stride, int offset) {
  Range r;
  r.lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  const int top = in - 1 - offset;
  r.hi = top < 0 ? -1 : std::min(out - 1, top / stride);
  return r;
}

Shape OutputShape(const Shape& in, const ConvSpec& spec) {
  return {in.n, spec.out_channels, spec.OutputSize(in.d), spec.OutputSize(in.h), spec.OutputSize(in.w)};
}

void CheckShapes(const Tensor& input, const LayerParams& params, const ConvSpec& spec) {
  spec.Validate();
  const Shape& s = input.shape();
  Require(s.c == spec.in_channels, ErrorCode::kInvalidArgument,
          "conv " + params.id + ": input has " + std::to_string(s.c) + " channels, expected " +
              std::to_string(spec.in_channels));
  const Shape ws{spec.out_channels, spec.in_channels, spec.kernel, spec.kernel, spec.kernel};
  RequireSameShape(params.weight.shape(), ws, "conv weight");
  RequireSameShape(params.bias.shape(), Shape{1, spec.out_channels, 1, 1, 1}, "conv bias");
  const Shape o = OutputShape(s, spec);
  Require(o.d >= 1 && o.h >= 1 && o.w >= 1, ErrorCode::kInvalidArgument, "conv output would be empty");
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using StridedRowMap = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;
using ConstStridedRowMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;

// Output rows (fixed od, oh) are processed in chunks whose column buffer
// stays cache-resident (about 1 MB).
constexpr std::int64_t kMaxColumnEntries = std::int64_t{1} << 17;

template <typename Fn>
void ForEachChunk(const Shape& is, const Shape& os, const ConvSpec& spec, Fn&& fn) {
  const std::int64_t kdim = static_cast<std::int64_t>(is.c) * spec.kernel * spec.kernel * spec.kernel;
  const std::int64_t rows = static_cast<std::int64_t>(os.d) * os.h;
  const std::int64_t step = std::clamp<std::int64_t>(kMaxColumnEntries / (kdim * os.w), 1, rows);
  for (std::int64_t r0 = 0; r0 < rows; r0 += step) fn(r0, std::min(rows, r0 + step));
}

// Row r = ((ci * k + a) * k + b) * k + c holds the input value under kernel
// tap (a, b, c) of channel ci for every output position in output rows
// [r0, r1), where an output row is od * H_out + oh.
void Im2Col(const Tensor& input, int n, const ConvSpec& spec, const Shape& os, std::int64_t r0, std::int64_t r1,
            std::vector<double>& col) {
  const Shape& is = input.shape();
  const int k = spec.kernel;
  const std::int64_t cols = (r1 - r0) * os.w;
  col.assign(static_cast<std::size_t>(static_cast<std::int64_t>(is.c) * k * k * k * cols), 0.0);
  std::int64_t row = 0;
  for (int ci = 0; ci < is.c; ++ci) {
    const double* src = input.channel(n, ci);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        for (int c = 0; c < k; ++c, ++row) {
          double* dst = col.data() + row * cols;
          const int off = c * spec.dilation - spec.padding;
          const Range r = ValidRange(is.w, os.w, spec.stride, off);
          for (std::int64_t orow = r0; orow < r1; ++orow) {
            const int od = static_cast<int>(orow / os.h);
            const int oh = static_cast<int>(orow % os.h);
            const int id = od * spec.stride + a * spec.dilation - spec.padding;
            const int ih = oh * spec.stride + b * spec.dilation - spec.padding;
            if (id < 0 || id >= is.d || ih < 0 || ih >= is.h) continue;
            const double* in_row = src + (static_cast<std::int64_t>(id) * is.h + ih) * is.w;
            double* out_row = dst + (orow - r0) * os.w;
            for (int ow = r.lo; ow <= r.hi; ++ow) out_row[ow] = in_row[ow * spec.stride + off];
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: scatters column gradients back onto the input gradient
// in a fixed order.
void Col2ImAdd(const std::vector<double>& gcol, int n, const ConvSpec& spec, const Shape& os, std::int64_t r0, std::int64_t r1,
               Tensor& grad_input) {
  const Shape& is = grad_input.shape();
  const int k = spec.kernel;
  const std::int64_t cols = (r1 - r0) * os.w;
  std::int64_t row = 0;
  for (int ci = 0; ci < is.c; ++ci) {
    double* dst = grad_input.channel(n, ci);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        for (int c = 0; c < k; ++c, ++row) {
          const double* src = gcol.data() + row * cols;
          const int off = c * spec.dilation - spec.padding;
          const Range r = ValidRange(is.w, os.w, spec.stride, off);
          for (std::int64_t orow = r0; orow < r1; ++orow) {
            const int od = static_cast<int>(orow / os.h);
            const int oh = static_cast<int>(orow % os.h);
            const int id = od * spec.stride + a * spec.dilation - spec.padding;
            const int ih = oh * spec.stride + b * spec.dilation - spec.padding;
            if (id < 0 || id >= is.d || ih < 0 || ih >= is.h) continue;
            double* in_row = dst + (static_cast<std::int64_t>(id) * is.h + ih) * is.w;
            const double* g_row = src + (orow - r0) * os.w;
            for (int ow = r.lo; ow <= r.hi; ++ow) in_row[ow * spec.stride + off] += g_row[ow];
          }
        }
      }
    }
  }
}

}  // namespace

ConvSpec ConvSpec::Same(int in, int out, int kernel, int dilation) {
  return {in, out, kernel, 1, dilation, dilation * (kernel - 1) / 2};
}

ConvSpec ConvSpec::Strided(int in, int out, int kernel, int stride) { return {in, out, kernel, stride, 1, (kernel - 1) / 2}; }

void ConvSpec::Validate() const {
  Require(in_channels >= 1 && out_channels >= 1, ErrorCode::kInvalidArgument, "conv channels must be >= 1");
  Require(kernel >= 1 && kernel % 2 == 1, ErrorCode::kInvalidArgument, "conv kernel must be odd");
  Require(stride >= 1 && dilation >= 1 && padding >= 0, ErrorCode::kInvalidArgument,
          "conv stride/dilation must be >= 1 and padding >= 0");
}

LayerParams MakeConvParams(const std::string& id, const ConvSpec& spec) {
  spec.Validate();
  LayerParams p;
  p.id = id;
  p.weight = Tensor({spec.out_channels, spec.in_channels, spec.kernel, spec.kernel, spec.kernel});
  p.bias = Tensor({1, spec.out_channels, 1, 1, 1});
  p.weight.EnableGrad();
  p.bias.EnableGrad();
  return p;
}

Tensor Conv3dForward(const Tensor& input, const LayerParams& params, const ConvSpec& spec) {
  CheckShapes(input, params, spec);
  const Shape& is = input.shape();
  const Shape os = OutputShape(is, spec);
  Tensor out(os);
  const std::int64_t kdim = static_cast<std::int64_t>(is.c) * spec.kernel * spec.kernel * spec.kernel;
  const ConstRowMap weights(params.weight.data().data(), spec.out_channels, kdim);
  const Eigen::Map<const Eigen::VectorXd> bias(params.bias.data().data(), spec.out_channels);
  std::vector<double> col;
  for (int n = 0; n < is.n; ++n) {
    ForEachChunk(is, os, spec, [&](std::int64_t r0, std::int64_t r1) {
      const std::int64_t cols = (r1 - r0) * os.w;
      Im2Col(input, n, spec, os, r0, r1, col);
      StridedRowMap dst(out.channel(n, 0) + r0 * os.w, os.c, cols,
                        Eigen::OuterStride<>(os.spatial()));
      dst.noalias() = weights * ConstRowMap(col.data(), kdim, cols);
      dst.colwise() += bias;
    });
  }
  return out;
}

ConvGrads Conv3dBackward(const Tensor& grad_out, const Tensor& input, const LayerParams& params,
                         const ConvSpec& spec) {
  CheckShapes(input, params, spec);
  const Shape& is = input.shape();
  const Shape os = OutputShape(is, spec);
  RequireSameShape(grad_out.shape(), os, "conv grad_out");
  const std::int64_t kdim = static_cast<std::int64_t>(is.c) * spec.kernel * spec.kernel * spec.kernel;
  const ConstRowMap weights(params.weight.data().data(), spec.out_channels, kdim);

  ConvGrads g{Tensor(is), Tensor(params.weight.shape()), Tensor(params.bias.shape())};
  RowMap gw(g.weight.data().data(), spec.out_channels, kdim);
  std::vector<double> col;
  std::vector<double> gcol;
  for (int n = 0; n < is.n; ++n) {
    ForEachChunk(is, os, spec, [&](std::int64_t r0, std::int64_t r1) {
      const std::int64_t cols = (r1 - r0) * os.w;
      const ConstStridedRowMap go(grad_out.channel(n, 0) + r0 * os.w, os.c, cols,
                                  Eigen::OuterStride<>(os.spatial()));
      Im2Col(input, n, spec, os, r0, r1, col);
      gw.noalias() += go * ConstRowMap(col.data(), kdim, cols).transpose();
      gcol.resize(static_cast<std::size_t>(kdim * cols));
      RowMap(gcol.data(), kdim, cols).noalias() = weights.transpose() * go;
      Col2ImAdd(gcol, n, spec, os, r0, r1, g.input);
    });
  }
  // Bias gradient: per-channel sum in plain index order.
  for (int co = 0; co < os.c; ++co) {
    double sum = 0.0;
    for (int n = 0; n < os.n; ++n) {
      const double* src = grad_out.channel(n, co);
      for (std::int64_t q = 0; q < os.spatial(); ++q) sum += src[q];
    }
    g.bias.data()[static_cast<std::size_t>(co)] = sum;
  }
  return g;
}

}  // namespace occpred::nn
