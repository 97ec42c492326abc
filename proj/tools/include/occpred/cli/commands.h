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

#ifndef OCCPRED_CLI_COMMANDS_H_
#define OCCPRED_CLI_COMMANDS_H_

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "occpred/common/error.h"
#include "occpred/config/manifest.h"
#include "occpred/config/run_config.h"

namespace occpred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitRuntime = 4;

// Environment variable that relocates relative output directories.
inline constexpr const char* kOutputRootEnv = "OCCPRED_OUTPUT_ROOT";

// Failure categories: configuration (kConfigError), missing or unreadable
// inputs (kIoError while reading, kInvalidArgument on input contents is a
// runtime failure), everything else runtime.
int ExitCodeFor(ErrorCode code);

// {"error": {"code": ..., "exit_code": ..., "message": ...}}
nlohmann::json ErrorJson(ErrorCode code, int exit_code, const std::string& message);

// Reads the config file (defaults when `path` is empty), applies `key=value`
// overrides in order and validates the result.
RunConfig LoadRunConfig(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides);

// Output directory: `out_override` when given, otherwise config.output_dir;
// relative paths are placed under $OCCPRED_OUTPUT_ROOT when it is set.
std::filesystem::path OutputDir(const RunConfig& config, const std::optional<std::filesystem::path>& out_override);

// The config as stored in config.json: the canonical document minus
// output_dir, so reruns into different directories hash identically.
nlohmann::json StoredConfig(const RunConfig& config);

// Each command writes its outputs plus config.json and run_manifest.json into
// `out` and returns the manifest. Inputs are never modified.
Manifest SceneGen(const RunConfig& config, const std::filesystem::path& out);
Manifest DatasetGen(const RunConfig& config, const std::filesystem::path& out);
Manifest TrainModel(const RunConfig& config, const std::filesystem::path& out);
Manifest EvalPredictor(const RunConfig& config, const std::filesystem::path& out);
Manifest Bench(const RunConfig& config, const std::filesystem::path& out);

struct InspectOptions {
  std::optional<std::string> slice_axis;  // "x", "y" or "z"
  std::optional<int> slice_index;         // defaults to the middle slice
  std::optional<std::filesystem::path> pgm;
  std::optional<std::filesystem::path> ply;
};

// Human-readable summary of a voxel file (.ocgr), weights file (.opnw),
// run manifest, dataset manifest or scene sidecar; voxel files can also be
// exported as a PGM slice and/or a PLY point list.
std::string Inspect(const std::filesystem::path& file, const InspectOptions& options);

}  // namespace occpred::cli

#endif  // OCCPRED_CLI_COMMANDS_H_
