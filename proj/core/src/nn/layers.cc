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

#include "occpred/nn/layers.h"

#include <cmath>

#include "occpred/common/error.h"
#include "occpred/common/parallel.h"

namespace occpred::nn {
namespace {

void CheckPerChannel(const Tensor& t, int channels, const char* what) {
  RequireSameShape(t.shape(), Shape{1, channels, 1, 1, 1}, what);
}

}  // namespace

Tensor ReluForward(const Tensor& x) {
  Tensor y(x.shape());
  auto in = x.data();
  auto out = y.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  return y;
}

Tensor ReluBackward(const Tensor& grad_out, const Tensor& x) {
  RequireSameShape(grad_out.shape(), x.shape(), "relu backward");
  Tensor g(x.shape());
  auto in = x.data();
  auto go = grad_out.data();
  auto out = g.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? go[i] : 0.0;
  return g;
}

Tensor SigmoidForward(const Tensor& x) {
  Tensor y(x.shape());
  auto in = x.data();
  auto out = y.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    // Branch on sign so exp never overflows.
    if (in[i] >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-in[i]));
    } else {
      const double e = std::exp(in[i]);
      out[i] = e / (1.0 + e);
    }
  }
  return y;
}

Tensor SigmoidBackward(const Tensor& grad_out, const Tensor& y) {
  RequireSameShape(grad_out.shape(), y.shape(), "sigmoid backward");
  Tensor g(y.shape());
  auto yy = y.data();
  auto go = grad_out.data();
  auto out = g.data();
  for (std::size_t i = 0; i < yy.size(); ++i) out[i] = go[i] * yy[i] * (1.0 - yy[i]);
  return g;
}

Tensor Upsample2xForward(const Tensor& x) {
  const Shape& s = x.shape();
  const Shape o{s.n, s.c, 2 * s.d, 2 * s.h, 2 * s.w};
  Tensor y(o);
  ParallelFor(static_cast<std::int64_t>(s.n) * s.c, [&](std::int64_t job) {
    const int n = static_cast<int>(job / s.c);
    const int c = static_cast<int>(job % s.c);
    const double* src = x.channel(n, c);
    double* dst = y.channel(n, c);
    for (int d = 0; d < o.d; ++d) {
      for (int h = 0; h < o.h; ++h) {
        const double* row = src + (static_cast<std::int64_t>(d / 2) * s.h + h / 2) * s.w;
        double* out = dst + (static_cast<std::int64_t>(d) * o.h + h) * o.w;
        for (int w = 0; w < o.w; ++w) out[w] = row[w / 2];
      }
    }
  });
  return y;
}

Tensor Upsample2xBackward(const Tensor& grad_out) {
  const Shape& o = grad_out.shape();
  Require(o.d % 2 == 0 && o.h % 2 == 0 && o.w % 2 == 0, ErrorCode::kInvalidArgument,
          "upsample backward: odd spatial size " + ToString(o));
  const Shape s{o.n, o.c, o.d / 2, o.h / 2, o.w / 2};
  Tensor g(s);
  ParallelFor(static_cast<std::int64_t>(s.n) * s.c, [&](std::int64_t job) {
    const int n = static_cast<int>(job / s.c);
    const int c = static_cast<int>(job % s.c);
    const double* src = grad_out.channel(n, c);
    double* dst = g.channel(n, c);
    // Fixed summation order over the eight children.
    for (int d = 0; d < s.d; ++d) {
      for (int h = 0; h < s.h; ++h) {
        for (int w = 0; w < s.w; ++w) {
          double sum = 0.0;
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              const double* row = src + (static_cast<std::int64_t>(2 * d + a) * o.h + 2 * h + b) * o.w;
              sum += row[2 * w] + row[2 * w + 1];
            }
          }
          dst[(static_cast<std::int64_t>(d) * s.h + h) * s.w + w] = sum;
        }
      }
    }
  });
  return g;
}

Tensor ConcatChannels(const std::vector<const Tensor*>& parts) {
  Require(!parts.empty(), ErrorCode::kInvalidArgument, "concat: no inputs");
  const Shape& first = parts.front()->shape();
  int channels = 0;
  for (const Tensor* p : parts) {
    const Shape& s = p->shape();
    Require(s.n == first.n && s.d == first.d && s.h == first.h && s.w == first.w, ErrorCode::kInvalidArgument,
            "concat: shape " + ToString(s) + " incompatible with " + ToString(first));
    channels += s.c;
  }
  Tensor y({first.n, channels, first.d, first.h, first.w});
  for (int n = 0; n < first.n; ++n) {
    int c_out = 0;
    for (const Tensor* p : parts) {
      for (int c = 0; c < p->shape().c; ++c, ++c_out) {
        std::copy_n(p->channel(n, c), first.spatial(), y.channel(n, c_out));
      }
    }
  }
  return y;
}

std::vector<Tensor> SplitChannels(const Tensor& x, const std::vector<int>& channels) {
  const Shape& s = x.shape();
  int total = 0;
  for (int c : channels) {
    Require(c >= 1, ErrorCode::kInvalidArgument, "split: channel count must be >= 1");
    total += c;
  }
  Require(total == s.c, ErrorCode::kInvalidArgument,
          "split: channel counts sum to " + std::to_string(total) + ", tensor has " + std::to_string(s.c));
  std::vector<Tensor> parts;
  parts.reserve(channels.size());
  for (int c : channels) parts.emplace_back(Shape{s.n, c, s.d, s.h, s.w});
  for (int n = 0; n < s.n; ++n) {
    int c_in = 0;
    for (Tensor& p : parts) {
      for (int c = 0; c < p.shape().c; ++c, ++c_in) std::copy_n(x.channel(n, c_in), s.spatial(), p.channel(n, c));
    }
  }
  return parts;
}

NormParams MakeNormParams(const std::string& id, int channels) {
  Require(channels >= 1, ErrorCode::kInvalidArgument, "norm: channels must be >= 1");
  NormParams p;
  p.id = id;
  p.gamma = Tensor({1, channels, 1, 1, 1}, 1.0);
  p.beta = Tensor({1, channels, 1, 1, 1}, 0.0);
  p.gamma.EnableGrad();
  p.beta.EnableGrad();
  p.running_mean.assign(static_cast<std::size_t>(channels), 0.0);
  p.running_var.assign(static_cast<std::size_t>(channels), 1.0);
  return p;
}

Tensor NormForwardTrain(const Tensor& x, NormParams& params, NormCache* cache, bool update_running) {
  const Shape& s = x.shape();
  const int channels = params.channels();
  Require(s.c == channels, ErrorCode::kInvalidArgument, "norm " + params.id + ": channel mismatch");
  CheckPerChannel(params.beta, channels, "norm beta");
  const std::int64_t count = static_cast<std::int64_t>(s.n) * s.spatial();
  Require(count > 1, ErrorCode::kNumericDegenerate,
          "norm " + params.id + ": batch statistics need more than one sample per channel");
  Tensor y(s);
  Tensor normalized(s);
  std::vector<double> inv_std(static_cast<std::size_t>(channels));
  ParallelFor(channels, [&](std::int64_t job) {
    const int c = static_cast<int>(job);
    double sum = 0.0;
    for (int n = 0; n < s.n; ++n) {
      const double* src = x.channel(n, c);
      for (std::int64_t q = 0; q < s.spatial(); ++q) sum += src[q];
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (int n = 0; n < s.n; ++n) {
      const double* src = x.channel(n, c);
      for (std::int64_t q = 0; q < s.spatial(); ++q) sq += (src[q] - mean) * (src[q] - mean);
    }
    const double var = sq / static_cast<double>(count);
    const double is = 1.0 / std::sqrt(var + params.eps);
    inv_std[static_cast<std::size_t>(c)] = is;
    const double g = params.gamma.data()[static_cast<std::size_t>(c)];
    const double b = params.beta.data()[static_cast<std::size_t>(c)];
    for (int n = 0; n < s.n; ++n) {
      const double* src = x.channel(n, c);
      double* nrm = normalized.channel(n, c);
      double* dst = y.channel(n, c);
      for (std::int64_t q = 0; q < s.spatial(); ++q) {
        nrm[q] = (src[q] - mean) * is;
        dst[q] = g * nrm[q] + b;
      }
    }
    if (update_running) {
      const double unbiased = sq / static_cast<double>(count - 1);
      auto& rm = params.running_mean[static_cast<std::size_t>(c)];
      auto& rv = params.running_var[static_cast<std::size_t>(c)];
      rm = (1.0 - params.momentum) * rm + params.momentum * mean;
      rv = (1.0 - params.momentum) * rv + params.momentum * unbiased;
    }
  });
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Tensor NormForwardInference(const Tensor& x, const NormParams& params) {
  const Shape& s = x.shape();
  const int channels = params.channels();
  Require(s.c == channels, ErrorCode::kInvalidArgument, "norm " + params.id + ": channel mismatch");
  Tensor y(s);
  for (int c = 0; c < channels; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    const double is = 1.0 / std::sqrt(params.running_var[cc] + params.eps);
    const double scale = params.gamma.data()[cc] * is;
    const double shift = params.beta.data()[cc] - params.running_mean[cc] * scale;
    for (int n = 0; n < s.n; ++n) {
      const double* src = x.channel(n, c);
      double* dst = y.channel(n, c);
      for (std::int64_t q = 0; q < s.spatial(); ++q) dst[q] = src[q] * scale + shift;
    }
  }
  return y;
}

NormGrads NormBackward(const Tensor& grad_out, const NormParams& params, const NormCache& cache) {
  const Shape& s = grad_out.shape();
  RequireSameShape(s, cache.normalized.shape(), "norm backward");
  const int channels = params.channels();
  Require(s.c == channels && cache.inv_std.size() == static_cast<std::size_t>(channels),
          ErrorCode::kInvalidArgument, "norm backward: channel mismatch");
  const double count = static_cast<double>(static_cast<std::int64_t>(s.n) * s.spatial());
  NormGrads g{Tensor(s), Tensor(params.gamma.shape()), Tensor(params.beta.shape())};
  ParallelFor(channels, [&](std::int64_t job) {
    const int c = static_cast<int>(job);
    const auto cc = static_cast<std::size_t>(c);
    double sum_g = 0.0;
    double sum_gx = 0.0;
    for (int n = 0; n < s.n; ++n) {
      const double* go = grad_out.channel(n, c);
      const double* xh = cache.normalized.channel(n, c);
      for (std::int64_t q = 0; q < s.spatial(); ++q) {
        sum_g += go[q];
        sum_gx += go[q] * xh[q];
      }
    }
    g.beta.data()[cc] = sum_g;
    g.gamma.data()[cc] = sum_gx;
    const double k = params.gamma.data()[cc] * cache.inv_std[cc] / count;
    for (int n = 0; n < s.n; ++n) {
      const double* go = grad_out.channel(n, c);
      const double* xh = cache.normalized.channel(n, c);
      double* gi = g.input.channel(n, c);
      for (std::int64_t q = 0; q < s.spatial(); ++q) gi[q] = k * (count * go[q] - sum_g - xh[q] * sum_gx);
    }
  });
  return g;
}

}  // namespace occpred::nn
