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

// occpred: command-line entry point for scene generation, dataset
// generation, training, evaluation, navigation benchmarks and inspection.

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "occpred/cli/commands.h"

namespace {

namespace fs = std::filesystem;
using occpred::cli::kExitConfig;
using occpred::cli::kExitOk;
using occpred::cli::kExitRuntime;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

void AddCommonOptions(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config, "JSON run config (defaults when omitted)");
  cmd->add_option("--set", opts.overrides, "Override a config key: dotted.key=value (repeatable)");
  cmd->add_option("-o,--out", opts.out, "Output directory (overrides output_dir)");
}

int ReportError(occpred::ErrorCode code, const std::string& message) {
  const int exit_code = occpred::cli::ExitCodeFor(code);
  std::cerr << occpred::cli::ErrorJson(code, exit_code, message).dump() << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occpred: occlusion-aware occupancy prediction for navigation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  CommonOptions common;
  using Command = occpred::Manifest (*)(const occpred::RunConfig&, const fs::path&);
  struct Entry {
    const char* name;
    const char* help;
    Command run;
  };
  const Entry entries[] = {
      {"scene-gen", "Generate scenes", &occpred::cli::SceneGen},
      {"dataset-gen", "Generate a training dataset of occluded/complete pairs", &occpred::cli::DatasetGen},
      {"train", "Train the occupancy prediction network", &occpred::cli::TrainModel},
      {"eval", "Evaluate a predictor on a dataset split", &occpred::cli::EvalPredictor},
      {"bench", "Run the navigation benchmark", &occpred::cli::Bench},
  };
  std::vector<std::pair<CLI::App*, Command>> commands;
  for (const Entry& e : entries) {
    CLI::App* cmd = app.add_subcommand(e.name, e.help);
    AddCommonOptions(cmd, common);
    commands.emplace_back(cmd, e.run);
  }

  CLI::App* inspect = app.add_subcommand("inspect", "Summarize a voxel, weights or manifest file");
  std::string inspect_file;
  occpred::cli::InspectOptions inspect_options;
  std::string slice_axis;
  int slice_index = -1;
  std::string pgm;
  std::string ply;
  inspect->add_option("file", inspect_file, "File to inspect")->required();
  inspect->add_option("--axis", slice_axis, "Slice axis for --pgm (x, y or z)");
  inspect->add_option("--index", slice_index, "Slice index for --pgm (default: middle)");
  inspect->add_option("--pgm", pgm, "Write an axis slice as PGM");
  inspect->add_option("--ply", ply, "Write occupied cell centres as PLY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);
  spdlog::set_pattern("[%l] %v");

  try {
    if (inspect->parsed()) {
      if (!slice_axis.empty()) inspect_options.slice_axis = slice_axis;
      if (slice_index >= 0) inspect_options.slice_index = slice_index;
      if (!pgm.empty()) inspect_options.pgm = pgm;
      if (!ply.empty()) inspect_options.ply = ply;
      std::cout << occpred::cli::Inspect(inspect_file, inspect_options);
      return kExitOk;
    }
    for (const auto& [cmd, run] : commands) {
      if (!cmd->parsed()) continue;
      const std::optional<fs::path> config_path =
          common.config.empty() ? std::nullopt : std::optional<fs::path>(common.config);
      const occpred::RunConfig config = occpred::cli::LoadRunConfig(config_path, common.overrides);
      const fs::path out = occpred::cli::OutputDir(
          config, common.out.empty() ? std::nullopt : std::optional<fs::path>(common.out));
      run(config, out);
      std::cout << nlohmann::json{{"output_dir", out.string()}, {"manifest_sha256", occpred::ManifestHash(out)}}.dump()
                << "\n";
      return kExitOk;
    }
  } catch (const occpred::Error& e) {
    return ReportError(e.code(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << occpred::cli::ErrorJson(occpred::ErrorCode::kIoError, kExitRuntime, e.what()).dump() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << occpred::cli::ErrorJson(occpred::ErrorCode::kInvalidArgument, kExitRuntime, e.what()).dump() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
