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

#ifndef OCCPRED_OCCLUSION_DATASET_H_
#define OCCPRED_OCCLUSION_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "occpred/occlusion/occlusion.h"
#include "occpred/scenegen/scene.h"

namespace occpred {

enum class Split { kTrain, kValidation };

const char* ToString(Split split);
Split SplitFromString(const std::string& name);

struct DatasetParams {
  GridDims block_dims{40, 40, 20};
  int blocks_per_scene = 2;
  int pairs_per_block = 2;
  double train_fraction = 0.8;
  // Fraction of target cells masked unknown to emulate reconstruction defects.
  double defect_fraction = 0.0;
  std::uint64_t seed = 1;

  void Validate() const;
};

nlohmann::json ToJson(const DatasetParams& params);
DatasetParams DatasetParamsFromJson(const nlohmann::json& json);

struct DatasetEntry {
  std::string id;
  int scene_index = 0;
  std::uint64_t scene_seed = 0;
  GridIndex block_offset;
  std::uint64_t seed = 0;
  Split split = Split::kTrain;
  double known_ratio = 0.0;
  std::string target_file;   // relative to the dataset directory
  std::string partial_file;  // noisy occluded map
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;
  std::vector<int> train_scenes;
  std::vector<int> validation_scenes;
  int skipped_pairs = 0;
  int skipped_scenes = 0;
};

// Layout: pairs/<id>.target.ocgr, pairs/<id>.partial.ocgr, manifest.json.
// Scenes are split (not pairs) so no scene contributes to both splits.
// `provenance` is embedded verbatim under the "provenance" key.
DatasetManifest GenerateDataset(const std::vector<SceneSpec>& scenes, const OcclusionParams& occlusion,
                                const NoiseParams& noise, const DatasetParams& params,
                                const std::filesystem::path& out_dir,
                                const nlohmann::json& provenance = nlohmann::json::object());

nlohmann::json ToJson(const DatasetManifest& manifest);
DatasetManifest DatasetManifestFromJson(const nlohmann::json& json);

DatasetManifest ReadDatasetManifest(const std::filesystem::path& dir);
// Loads every pair of `split` in manifest order.
std::vector<DataPair> LoadPairs(const std::filesystem::path& dir, const DatasetManifest& manifest, Split split);

// Extracts a defect-masked block target (shared by the dataset writer and tests).
OccupancyGrid MaskDefects(const OccupancyGrid& target, double fraction, Rng& rng);

}  // namespace occpred

#endif  // OCCPRED_OCCLUSION_DATASET_H_
