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

#include "occpred/occlusion/dataset.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "occpred/common/binary_io.h"
#include "occpred/common/error.h"
#include "occpred/common/hash.h"
#include "occpred/common/json_util.h"
#include "occpred/voxel/grid_io.h"

namespace occpred {
namespace {

constexpr std::uint64_t kSplitStream = 0x5b1;
constexpr std::uint64_t kBlockStream = 0xb10c;
constexpr std::uint64_t kNoiseStream = 0x7015e;

std::string PairId(int scene, int block, int pair) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "s%04d_b%02d_p%02d", scene, block, pair);
  return buf;
}

}  // namespace

const char* ToString(Split split) { return split == Split::kTrain ? "train" : "validation"; }

Split SplitFromString(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "val") return Split::kValidation;
  Throw(ErrorCode::kInvalidArgument, "unknown split '" + name + "'");
}

void DatasetParams::Validate() const {
  Require(block_dims.x >= 1 && block_dims.y >= 1 && block_dims.z >= 1, ErrorCode::kInvalidArgument,
          "block dims must be >= 1");
  Require(blocks_per_scene >= 1 && pairs_per_block >= 1, ErrorCode::kInvalidArgument,
          "blocks_per_scene and pairs_per_block must be >= 1");
  Require(train_fraction >= 0.0 && train_fraction <= 1.0, ErrorCode::kInvalidArgument,
          "train_fraction must be in [0,1]");
  Require(defect_fraction >= 0.0 && defect_fraction < 1.0, ErrorCode::kInvalidArgument,
          "defect_fraction must be in [0,1)");
}

nlohmann::json ToJson(const DatasetParams& p) {
  return {{"block_dims", {p.block_dims.x, p.block_dims.y, p.block_dims.z}},
          {"blocks_per_scene", p.blocks_per_scene},
          {"pairs_per_block", p.pairs_per_block},
          {"train_fraction", p.train_fraction},
          {"defect_fraction", p.defect_fraction},
          {"seed", p.seed}};
}

DatasetParams DatasetParamsFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json,
                    {"block_dims", "blocks_per_scene", "pairs_per_block", "train_fraction", "defect_fraction", "seed"},
                    "dataset params");
  DatasetParams p;
  if (json.contains("block_dims")) {
    std::vector<int> d;
    ReadOptional(json, "block_dims", d);
    Require(d.size() == 3, ErrorCode::kConfigError, "dataset params: block_dims must have three entries");
    p.block_dims = {d[0], d[1], d[2]};
  }
  ReadOptional(json, "blocks_per_scene", p.blocks_per_scene);
  ReadOptional(json, "pairs_per_block", p.pairs_per_block);
  ReadOptional(json, "train_fraction", p.train_fraction);
  ReadOptional(json, "defect_fraction", p.defect_fraction);
  ReadOptional(json, "seed", p.seed);
  try {
    p.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return p;
}

OccupancyGrid MaskDefects(const OccupancyGrid& target, double fraction, Rng& rng) {
  OccupancyGrid out = target;
  if (fraction <= 0.0) return out;
  for (float& v : out.cells()) {
    if (rng.Bernoulli(fraction)) v = kUnknown;
  }
  return out;
}

DatasetManifest GenerateDataset(const std::vector<SceneSpec>& scenes, const OcclusionParams& occlusion,
                                const NoiseParams& noise, const DatasetParams& params,
                                const std::filesystem::path& out_dir, const nlohmann::json& provenance) {
  occlusion.Validate();
  noise.Validate();
  params.Validate();
  Require(!scenes.empty(), ErrorCode::kInvalidArgument, "no scene specs given");

  DatasetManifest manifest;
  const int n_scenes = static_cast<int>(scenes.size());
  std::vector<int> order(static_cast<std::size_t>(n_scenes));
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(DeriveSeed(params.seed, kSplitStream));
  split_rng.Shuffle(std::span<int>(order));
  const int n_train = static_cast<int>(std::lround(params.train_fraction * n_scenes));
  std::vector<Split> scene_split(static_cast<std::size_t>(n_scenes), Split::kValidation);
  for (int r = 0; r < n_train; ++r) scene_split[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = Split::kTrain;
  for (int s = 0; s < n_scenes; ++s) {
    (scene_split[static_cast<std::size_t>(s)] == Split::kTrain ? manifest.train_scenes : manifest.validation_scenes)
        .push_back(s);
  }

  std::filesystem::create_directories(out_dir / "pairs");
  nlohmann::json files = nlohmann::json::array();
  for (int s = 0; s < n_scenes; ++s) {
    const SceneSpec& spec = scenes[static_cast<std::size_t>(s)];
    Scene scene;
    try {
      scene = GenerateScene(spec);
    } catch (const Error& e) {
      spdlog::warn("scene {} skipped: {}", s, e.what());
      ++manifest.skipped_scenes;
      continue;
    }
    const GridDims& sd = scene.grid.dims();
    const GridDims& bd = params.block_dims;
    Require(bd.x <= sd.x && bd.y <= sd.y && bd.z <= sd.z, ErrorCode::kInvalidArgument,
            "block dims exceed scene dims");
    for (int b = 0; b < params.blocks_per_scene; ++b) {
      Rng block_rng(DeriveSeed(DeriveSeed(params.seed, kBlockStream), (static_cast<std::uint64_t>(s) << 16) | b));
      Region region;
      region.dims = bd;
      region.offset = {static_cast<int>(block_rng.Below(static_cast<std::uint64_t>(sd.x - bd.x) + 1)),
                       static_cast<int>(block_rng.Below(static_cast<std::uint64_t>(sd.y - bd.y) + 1)),
                       static_cast<int>(block_rng.Below(static_cast<std::uint64_t>(sd.z - bd.z) + 1))};
      const OccupancyGrid target = MaskDefects(ExtractBlock(scene.grid, region), params.defect_fraction, block_rng);
      for (int p = 0; p < params.pairs_per_block; ++p) {
        DatasetEntry entry;
        entry.id = PairId(s, b, p);
        entry.scene_index = s;
        entry.scene_seed = spec.seed;
        entry.block_offset = region.offset;
        entry.seed = DeriveSeed(params.seed, (static_cast<std::uint64_t>(s) << 32) | (static_cast<std::uint64_t>(b) << 16) | p);
        entry.split = scene_split[static_cast<std::size_t>(s)];
        Rng pair_rng(entry.seed);
        DataPair pair;
        try {
          pair = GenerateOccludedMap(target, occlusion, pair_rng);
        } catch (const Error& e) {
          spdlog::warn("pair {} skipped: {}", entry.id, e.what());
          ++manifest.skipped_pairs;
          continue;
        }
        NoiseParams pair_noise = noise;
        pair_noise.seed = DeriveSeed(noise.seed ^ entry.seed, kNoiseStream);
        Rng noise_rng(pair_noise.seed);
        const OccupancyGrid noisy = AddNoise(pair.partial, pair_noise, noise_rng);
        entry.known_ratio = pair.known_ratio;
        entry.target_file = "pairs/" + entry.id + ".target.ocgr";
        entry.partial_file = "pairs/" + entry.id + ".partial.ocgr";
        WriteGrid(out_dir / entry.target_file, target);
        WriteGrid(out_dir / entry.partial_file, noisy);
        manifest.entries.push_back(entry);
      }
    }
  }

  nlohmann::json doc = ToJson(manifest);
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& e : manifest.entries) {
    hashes[e.target_file] = Sha256File(out_dir / e.target_file);
    hashes[e.partial_file] = Sha256File(out_dir / e.partial_file);
  }
  doc["file_sha256"] = hashes;
  doc["provenance"] = provenance;
  WriteFileText(out_dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

nlohmann::json ToJson(const DatasetManifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"id", e.id},
                       {"scene_index", e.scene_index},
                       {"scene_seed", e.scene_seed},
                       {"block_offset", {e.block_offset.i, e.block_offset.j, e.block_offset.k}},
                       {"seed", e.seed},
                       {"split", ToString(e.split)},
                       {"known_ratio", e.known_ratio},
                       {"target", e.target_file},
                       {"partial", e.partial_file}});
  }
  return {{"format", "occpred-dataset"},
          {"version", 1},
          {"entries", entries},
          {"train_scenes", manifest.train_scenes},
          {"validation_scenes", manifest.validation_scenes},
          {"skipped_pairs", manifest.skipped_pairs},
          {"skipped_scenes", manifest.skipped_scenes}};
}

DatasetManifest DatasetManifestFromJson(const nlohmann::json& json) {
  DatasetManifest manifest;
  try {
    for (const auto& e : json.at("entries")) {
      DatasetEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.scene_index = e.at("scene_index").get<int>();
      entry.scene_seed = e.at("scene_seed").get<std::uint64_t>();
      const auto& off = e.at("block_offset");
      entry.block_offset = {off.at(0).get<int>(), off.at(1).get<int>(), off.at(2).get<int>()};
      entry.seed = e.at("seed").get<std::uint64_t>();
      entry.split = SplitFromString(e.at("split").get<std::string>());
      entry.known_ratio = e.at("known_ratio").get<double>();
      entry.target_file = e.at("target").get<std::string>();
      entry.partial_file = e.at("partial").get<std::string>();
      manifest.entries.push_back(entry);
    }
    manifest.train_scenes = json.at("train_scenes").get<std::vector<int>>();
    manifest.validation_scenes = json.at("validation_scenes").get<std::vector<int>>();
    manifest.skipped_pairs = json.value("skipped_pairs", 0);
    manifest.skipped_scenes = json.value("skipped_scenes", 0);
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIoError, std::string("malformed dataset manifest: ") + e.what());
  }
  return manifest;
}

DatasetManifest ReadDatasetManifest(const std::filesystem::path& dir) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(ReadFileText(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIoError, std::string("cannot parse manifest: ") + e.what());
  }
  return DatasetManifestFromJson(json);
}

std::vector<DataPair> LoadPairs(const std::filesystem::path& dir, const DatasetManifest& manifest, Split split) {
  std::vector<DataPair> pairs;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    DataPair pair;
    pair.target = ReadGrid(dir / e.target_file);
    pair.partial = ReadGrid(dir / e.partial_file);
    Require(pair.target.geometry() == pair.partial.geometry(), ErrorCode::kIoError, "pair geometry mismatch: " + e.id);
    pair.id = e.id;
    pair.scene_id = "scene" + std::to_string(e.scene_index);
    pair.seed = e.seed;
    pair.known_ratio = e.known_ratio;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace occpred
