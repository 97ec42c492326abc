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

#ifndef OCCPRED_CONFIG_RUN_CONFIG_H_
#define OCCPRED_CONFIG_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "occpred/navsim/benchmark.h"
#include "occpred/occlusion/dataset.h"
#include "occpred/occlusion/occlusion.h"
#include "occpred/predictor/opnet.h"
#include "occpred/predictor/trainer.h"
#include "occpred/scenegen/scene.h"

namespace occpred {

struct SceneGenSection {
  SceneSpec spec;
  int count = 1;
};

struct DatasetSection {
  // Scene i uses templates[i % templates.size()].
  std::vector<SceneSpec> templates;
  int scene_count = 70;
  OcclusionParams occlusion;
  NoiseParams noise;
  DatasetParams params;
};

struct TrainSection {
  std::string dataset;  // dataset directory (input)
  OPNetConfig model;
  TrainOptions options;
  int max_train_pairs = 0;  // 0 = all
};

struct EvalSection {
  std::string dataset;
  std::string split = "validation";
  std::string predictor = "OPNET";  // ORACLE, ALL_FREE, ALL_OCCUPIED, PASSTHROUGH, OPNET
  std::string checkpoint;           // weights file for OPNET
  double threshold = kDefaultOccupancyThreshold;
};

struct BenchSection {
  BenchmarkConfig config;
  std::string checkpoint;  // weights file for PREDICTED(OPNET)
  bool export_paths = false;
};

// Whole-pipeline configuration. Every seed used by a command derives from
// `seed` (see the Derived* helpers); sections carry no seeds of their own.
struct RunConfig {
  std::string output_dir = "occpred_out";
  std::uint64_t seed = 1;
  SceneGenSection scenes;
  DatasetSection dataset;
  TrainSection train;
  EvalSection eval;
  BenchSection bench;

  RunConfig();
};

// Schema check: unknown keys, wrong types, invalid values and per-section
// "seed" keys are kConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& json);
// Canonical (fully resolved) document; ToJson(RunConfigFromJson(ToJson(c)))
// reproduces it exactly.
nlohmann::json ToJson(const RunConfig& config);

// Sets `dotted.key.path` to `value` (parsed as JSON when it is valid JSON,
// otherwise taken as a string), creating intermediate objects. Throws
// kConfigError for a malformed override.
void ApplyOverride(nlohmann::json& document, std::string_view assignment);

// Reads a JSON config file (kIoError when unreadable, kConfigError when not JSON).
nlohmann::json ReadConfigDocument(const std::filesystem::path& path);

// Resolves the output directory: a relative `output_dir` is placed under
// `output_root` when that is non-empty.
std::filesystem::path ResolveOutputDir(const std::string& output_dir, const std::string& output_root);

// Per-command seeds split from the root seed.
enum class SeedStream : std::uint64_t { kScenes = 1, kDatasetScenes, kDataset, kNoise, kModel, kTraining, kBench };
std::uint64_t DerivedSeed(const RunConfig& config, SeedStream stream);
// Scene specs of dataset-gen with their derived seeds.
std::vector<SceneSpec> DatasetSceneSpecs(const RunConfig& config);

}  // namespace occpred

#endif  // OCCPRED_CONFIG_RUN_CONFIG_H_
