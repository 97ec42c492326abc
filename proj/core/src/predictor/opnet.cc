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

#include "occpred/predictor/opnet.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/common/rng.h"
#include "occpred/nn/layers.h"

namespace occpred {
namespace {

std::string DownId(int level, char part) { return "down" + std::to_string(level) + "." + part; }
std::string BranchId(int branch) { return "aspp.b" + std::to_string(branch); }
std::string DecId(int level) { return "dec" + std::to_string(level); }

nn::ConvLayer MakeLayer(const std::string& id, const nn::ConvSpec& spec, bool norm) {
  nn::ConvLayer layer{spec, nn::MakeConvParams(id, spec), std::nullopt};
  if (norm) layer.norm = nn::MakeNormParams(id + ".norm", spec.out_channels);
  return layer;
}

void Accumulate(nn::Tensor& param, const nn::Tensor& grad) {
  auto dst = param.grad();
  auto src = grad.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void AddInto(nn::Tensor& dst, const nn::Tensor& src) {
  nn::RequireSameShape(dst.shape(), src.shape(), "gradient sum");
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

int OPNetConfig::BranchWidth() const {
  return aspp_branch_width > 0 ? aspp_branch_width : std::max(1, Width(depth) / 2);
}

void OPNetConfig::Validate() const {
  Require(base_width >= 1 && base_width <= 256, ErrorCode::kInvalidArgument, "opnet: base_width must be in [1, 256]");
  Require(depth >= 1 && depth <= 5, ErrorCode::kInvalidArgument, "opnet: depth must be in [1, 5]");
  Require(!dilations.empty(), ErrorCode::kInvalidArgument, "opnet: at least one dilation is required");
  for (int d : dilations) Require(d >= 1, ErrorCode::kInvalidArgument, "opnet: dilations must be >= 1");
  Require(aspp_branch_width >= 0, ErrorCode::kInvalidArgument, "opnet: aspp_branch_width must be >= 0");
  const int factor = 1 << depth;
  Require(block_dims.x > 0 && block_dims.y > 0 && block_dims.z > 0 && block_dims.x % factor == 0 &&
              block_dims.y % factor == 0 && block_dims.z % factor == 0,
          ErrorCode::kInvalidArgument,
          "opnet: block dims " + ToString(block_dims) + " must be positive and divisible by " + std::to_string(factor));
}

nlohmann::json ToJson(const OPNetConfig& c) {
  return {{"base_width", c.base_width},
          {"depth", c.depth},
          {"dilations", c.dilations},
          {"aspp_branch_width", c.aspp_branch_width},
          {"block_dims", {c.block_dims.x, c.block_dims.y, c.block_dims.z}},
          {"seed", c.seed}};
}

OPNetConfig OPNetConfigFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"base_width", "depth", "dilations", "aspp_branch_width", "block_dims", "seed"}, "opnet");
  OPNetConfig c;
  ReadOptional(json, "base_width", c.base_width);
  ReadOptional(json, "depth", c.depth);
  ReadOptional(json, "dilations", c.dilations);
  ReadOptional(json, "aspp_branch_width", c.aspp_branch_width);
  ReadOptional(json, "seed", c.seed);
  if (json.contains("block_dims")) {
    std::vector<int> d;
    ReadOptional(json, "block_dims", d);
    Require(d.size() == 3, ErrorCode::kConfigError, "opnet.block_dims must have three entries");
    c.block_dims = {d[0], d[1], d[2]};
  }
  try {
    c.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return c;
}

nn::Tensor EncodeBlocks(const std::vector<const TrinaryGrid*>& blocks) {
  Require(!blocks.empty(), ErrorCode::kInvalidArgument, "encode: no blocks");
  const GridDims dims = blocks.front()->dims();
  nn::Tensor t({static_cast<int>(blocks.size()), 1, dims.x, dims.y, dims.z});
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    Require(blocks[n]->dims() == dims, ErrorCode::kInvalidArgument, "encode: blocks differ in dims");
    auto cells = blocks[n]->cells();
    double* dst = t.channel(static_cast<int>(n), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) dst[i] = cells[i];
  }
  return t;
}

OPNetModel OPNetModel::Build(const OPNetConfig& config) {
  config.Validate();
  OPNetModel m;
  m.config_ = config;
  const int w0 = config.Width(0);
  m.layers_.push_back(MakeLayer("enc0.a", nn::ConvSpec::Same(1, w0), true));
  m.layers_.push_back(MakeLayer("enc0.b", nn::ConvSpec::Same(w0, w0), true));
  for (int l = 1; l <= config.depth; ++l) {
    m.layers_.push_back(MakeLayer(DownId(l, 'a'), nn::ConvSpec::Strided(config.Width(l - 1), config.Width(l), 3, 2), true));
    m.layers_.push_back(MakeLayer(DownId(l, 'b'), nn::ConvSpec::Same(config.Width(l), config.Width(l)), true));
  }
  const int wd = config.Width(config.depth);
  const int wb = config.BranchWidth();
  for (std::size_t i = 0; i < config.dilations.size(); ++i) {
    m.layers_.push_back(MakeLayer(BranchId(static_cast<int>(i)), nn::ConvSpec::Same(wd, wb, 3, config.dilations[i]), true));
  }
  m.layers_.push_back(
      MakeLayer("aspp.fuse", nn::ConvSpec::Same(wb * static_cast<int>(config.dilations.size()), wd, 1), true));
  for (int l = config.depth - 1; l >= 0; --l) {
    m.layers_.push_back(MakeLayer(DecId(l), nn::ConvSpec::Same(config.Width(l + 1) + config.Width(l), config.Width(l)), true));
  }
  m.layers_.push_back(MakeLayer("head", nn::ConvSpec::Same(w0, 1, 1), false));

  for (std::size_t i = 0; i < m.layers_.size(); ++i) {
    nn::ConvLayer& layer = m.layers_[i];
    Rng rng(DeriveSeed(config.seed, i));
    const double fan_in = static_cast<double>(layer.spec.in_channels) * layer.spec.kernel * layer.spec.kernel *
                          layer.spec.kernel;
    const double stddev = std::sqrt(2.0 / fan_in);
    for (double& w : layer.conv.weight.data()) w = stddev * rng.Normal();
  }
  m.IndexLayers();
  return m;
}

OPNetModel OPNetModel::FromLayers(std::vector<nn::ConvLayer> layers, const GridDims& block_dims) {
  std::map<std::string, const nn::ConvLayer*> by_id;
  for (const nn::ConvLayer& l : layers) {
    Require(by_id.emplace(l.conv.id, &l).second, ErrorCode::kInvalidArgument, "opnet: duplicate layer " + l.conv.id);
  }
  auto find = [&](const std::string& id) -> const nn::ConvLayer& {
    auto it = by_id.find(id);
    Require(it != by_id.end(), ErrorCode::kInvalidArgument, "opnet: missing layer " + id);
    return *it->second;
  };
  OPNetConfig config;
  config.block_dims = block_dims;
  config.base_width = find("enc0.a").spec.out_channels;
  config.depth = 0;
  while (by_id.count(DownId(config.depth + 1, 'a')) != 0) ++config.depth;
  config.dilations.clear();
  while (by_id.count(BranchId(static_cast<int>(config.dilations.size()))) != 0) {
    config.dilations.push_back(find(BranchId(static_cast<int>(config.dilations.size()))).spec.dilation);
  }
  Require(!config.dilations.empty(), ErrorCode::kInvalidArgument, "opnet: no aspp branches");
  config.aspp_branch_width = find(BranchId(0)).spec.out_channels;

  OPNetModel m = Build(config);
  Require(m.layers_.size() == layers.size(), ErrorCode::kInvalidArgument,
          "opnet: serialized layer count does not match the recovered architecture");
  for (nn::ConvLayer& dst : m.layers_) {
    const nn::ConvLayer& src = find(dst.conv.id);
    Require(src.spec == dst.spec && src.norm.has_value() == dst.norm.has_value(), ErrorCode::kInvalidArgument,
            "opnet: layer " + dst.conv.id + " does not match the recovered architecture");
    std::copy(src.conv.weight.data().begin(), src.conv.weight.data().end(), dst.conv.weight.data().begin());
    std::copy(src.conv.bias.data().begin(), src.conv.bias.data().end(), dst.conv.bias.data().begin());
    if (dst.norm) {
      std::copy(src.norm->gamma.data().begin(), src.norm->gamma.data().end(), dst.norm->gamma.data().begin());
      std::copy(src.norm->beta.data().begin(), src.norm->beta.data().end(), dst.norm->beta.data().begin());
      dst.norm->running_mean = src.norm->running_mean;
      dst.norm->running_var = src.norm->running_var;
    }
  }
  return m;
}

OPNetModel OPNetModel::Load(const std::filesystem::path& path, const GridDims& block_dims) {
  return FromLayers(nn::ReadWeights(path), block_dims);
}

void OPNetModel::Save(const std::filesystem::path& path) const { nn::WriteWeights(path, layers_); }

void OPNetModel::IndexLayers() {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < layers_.size(); ++i) index[layers_[i].conv.id] = static_cast<int>(i);
  enc_a_ = index.at("enc0.a");
  enc_b_ = index.at("enc0.b");
  down_a_.assign(static_cast<std::size_t>(config_.depth) + 1, -1);
  down_b_.assign(static_cast<std::size_t>(config_.depth) + 1, -1);
  for (int l = 1; l <= config_.depth; ++l) {
    down_a_[static_cast<std::size_t>(l)] = index.at(DownId(l, 'a'));
    down_b_[static_cast<std::size_t>(l)] = index.at(DownId(l, 'b'));
  }
  aspp_branches_.clear();
  for (std::size_t i = 0; i < config_.dilations.size(); ++i) aspp_branches_.push_back(index.at(BranchId(static_cast<int>(i))));
  aspp_fuse_ = index.at("aspp.fuse");
  dec_.assign(static_cast<std::size_t>(config_.depth), -1);
  for (int l = 0; l < config_.depth; ++l) dec_[static_cast<std::size_t>(l)] = index.at(DecId(l));
  head_ = index.at("head");
}

std::int64_t OPNetModel::ParameterCount() const {
  std::int64_t count = 0;
  for (const nn::ConvLayer& l : layers_) {
    count += l.conv.weight.numel() + l.conv.bias.numel();
    if (l.norm) count += l.norm->gamma.numel() + l.norm->beta.numel();
  }
  return count;
}

template <typename Self>
nn::Tensor OPNetModel::RunLayer(Self& self, int index, const nn::Tensor& x, Cache* cache) {
  auto& layer = self.layers_[static_cast<std::size_t>(index)];
  nn::Tensor y = nn::Conv3dForward(x, layer.conv, layer.spec);
  LayerCache* lc = cache != nullptr ? &cache->layers[static_cast<std::size_t>(index)] : nullptr;
  if (layer.norm) {
    if constexpr (std::is_const_v<Self>) {
      y = nn::NormForwardInference(y, *layer.norm);
    } else {
      y = nn::NormForwardTrain(y, *layer.norm, &lc->norm, self.update_running_);
    }
  }
  y = self.ActivationOf(index) == Activation::kSigmoid ? nn::SigmoidForward(y) : nn::ReluForward(y);
  if (lc != nullptr) {
    lc->input = x;
    lc->output = y;
  }
  return y;
}

template <typename Self>
nn::Tensor OPNetModel::Forward(Self& self, const nn::Tensor& input, Cache* cache) {
  Require(input.shape().c == 1, ErrorCode::kInvalidArgument, "opnet: input must have one channel");
  const GridDims& b = self.config_.block_dims;
  Require(input.shape().d == b.x && input.shape().h == b.y && input.shape().w == b.z, ErrorCode::kInvalidArgument,
          "opnet: input " + nn::ToString(input.shape()) + " does not match block dims " + ToString(b));
  if (cache != nullptr) cache->layers.assign(self.layers_.size(), LayerCache{});
  const int depth = self.config_.depth;
  std::vector<nn::Tensor> skips;
  nn::Tensor x = RunLayer(self, self.enc_a_, input, cache);
  x = RunLayer(self, self.enc_b_, x, cache);
  for (int l = 1; l <= depth; ++l) {
    skips.push_back(x);
    x = RunLayer(self, self.down_a_[static_cast<std::size_t>(l)], x, cache);
    x = RunLayer(self, self.down_b_[static_cast<std::size_t>(l)], x, cache);
  }
  std::vector<nn::Tensor> branches;
  for (int idx : self.aspp_branches_) branches.push_back(RunLayer(self, idx, x, cache));
  std::vector<const nn::Tensor*> parts;
  for (const nn::Tensor& t : branches) parts.push_back(&t);
  x = RunLayer(self, self.aspp_fuse_, nn::ConcatChannels(parts), cache);
  for (int l = depth - 1; l >= 0; --l) {
    const nn::Tensor up = nn::Upsample2xForward(x);
    x = RunLayer(self, self.dec_[static_cast<std::size_t>(l)], nn::ConcatChannels({&up, &skips[static_cast<std::size_t>(l)]}),
                 cache);
  }
  x = RunLayer(self, self.head_, x, cache);
  if (cache != nullptr) cache->valid = true;
  return x;
}

nn::Tensor OPNetModel::Infer(const nn::Tensor& input) const { return Forward(*this, input, nullptr); }

nn::Tensor OPNetModel::TrainForward(const nn::Tensor& input, bool update_running_stats) {
  update_running_ = update_running_stats;
  cache_.valid = false;
  return Forward(*this, input, &cache_);
}

nn::Tensor OPNetModel::BackLayer(int index, const nn::Tensor& grad_out) {
  nn::ConvLayer& layer = layers_[static_cast<std::size_t>(index)];
  const LayerCache& lc = cache_.layers[static_cast<std::size_t>(index)];
  nn::Tensor g = ActivationOf(index) == Activation::kSigmoid ? nn::SigmoidBackward(grad_out, lc.output)
                                                             : nn::ReluBackward(grad_out, lc.output);
  if (layer.norm) {
    nn::NormGrads ng = nn::NormBackward(g, *layer.norm, lc.norm);
    Accumulate(layer.norm->gamma, ng.gamma);
    Accumulate(layer.norm->beta, ng.beta);
    g = std::move(ng.input);
  }
  nn::ConvGrads cg = nn::Conv3dBackward(g, lc.input, layer.conv, layer.spec);
  Accumulate(layer.conv.weight, cg.weight);
  Accumulate(layer.conv.bias, cg.bias);
  return std::move(cg.input);
}

nn::Tensor OPNetModel::Backward(const nn::Tensor& grad_probs) {
  Require(cache_.valid, ErrorCode::kInvalidArgument, "opnet: Backward without a preceding TrainForward");
  const int depth = config_.depth;
  nn::Tensor g = BackLayer(head_, grad_probs);
  std::vector<nn::Tensor> skip_grads(static_cast<std::size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    const int idx = dec_[static_cast<std::size_t>(l)];
    nn::Tensor gc = BackLayer(idx, g);
    const int up_channels = config_.Width(l + 1);
    std::vector<nn::Tensor> split = nn::SplitChannels(gc, {up_channels, gc.shape().c - up_channels});
    skip_grads[static_cast<std::size_t>(l)] = std::move(split[1]);
    g = nn::Upsample2xBackward(split[0]);
  }
  nn::Tensor gcat = BackLayer(aspp_fuse_, g);
  std::vector<int> widths(aspp_branches_.size(), config_.BranchWidth());
  std::vector<nn::Tensor> branch_grads = nn::SplitChannels(gcat, widths);
  nn::Tensor gx;
  for (std::size_t i = 0; i < aspp_branches_.size(); ++i) {
    nn::Tensor gi = BackLayer(aspp_branches_[i], branch_grads[i]);
    if (i == 0) {
      gx = std::move(gi);
    } else {
      AddInto(gx, gi);
    }
  }
  g = std::move(gx);
  for (int l = depth; l >= 1; --l) {
    g = BackLayer(down_b_[static_cast<std::size_t>(l)], g);
    g = BackLayer(down_a_[static_cast<std::size_t>(l)], g);
    AddInto(g, skip_grads[static_cast<std::size_t>(l - 1)]);
  }
  g = BackLayer(enc_b_, g);
  g = BackLayer(enc_a_, g);
  return g;
}

std::vector<nn::Tensor*> OPNetModel::Parameters() {
  std::vector<nn::Tensor*> params;
  for (nn::ConvLayer& l : layers_) {
    params.push_back(&l.conv.weight);
    params.push_back(&l.conv.bias);
    if (l.norm) {
      params.push_back(&l.norm->gamma);
      params.push_back(&l.norm->beta);
    }
  }
  return params;
}

void OPNetModel::ZeroGrad() {
  for (nn::Tensor* p : Parameters()) p->ZeroGrad();
}

OccupancyGrid OPNetPredictor::Predict(const TrinaryGrid& block) const {
  Require(block.dims() == model_->config().block_dims, ErrorCode::kInvalidArgument,
          "opnet predictor: block dims " + ToString(block.dims()) + " differ from model dims " +
              ToString(model_->config().block_dims));
  const nn::Tensor probs = model_->Infer(EncodeBlocks({&block}));
  OccupancyGrid out(block.geometry());
  auto src = probs.data();
  auto dst = out.cells();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(std::clamp(src[i], 0.0, 1.0));
  return out;
}

}  // namespace occpred
