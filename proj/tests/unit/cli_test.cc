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

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "occpred/cli/commands.h"
#include "occpred/common/error.h"
#include "occpred/config/manifest.h"

namespace occpred::cli {
namespace {

namespace fs = std::filesystem;

// A dataset small enough to generate in a few seconds.
RunConfig SmallRunConfig() {
  nlohmann::json doc = nlohmann::json::object();
  ApplyOverride(doc, "seed=4");
  ApplyOverride(doc, R"cfg(dataset.templates=[{"kind": "BOX_FIELD", "extents": [6.0, 6.0, 2.0], "obstacle_count": 6}])cfg");
  ApplyOverride(doc, "dataset.scene_count=2");
  ApplyOverride(doc, "dataset.params.blocks_per_scene=1");
  ApplyOverride(doc, "dataset.params.pairs_per_block=2");
  ApplyOverride(doc, "dataset.params.train_fraction=0.5");
  ApplyOverride(doc, "dataset.occlusion.rays_per_scan=512");
  ApplyOverride(doc, "bench.trials=2");
  ApplyOverride(doc, "bench.scene.extents=[6.0, 6.0, 2.0]");
  ApplyOverride(doc, "bench.scene.obstacle_count=4");
  ApplyOverride(doc, R"cfg(bench.schemes=["AGGRESSIVE", "PREDICTED(ALL_FREE)", "PREDICTED(ORACLE)"])cfg");
  return RunConfigFromJson(doc);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("occpred_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

TEST(ExitCodes, CategoriesMapToDistinctCodes) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kConfigError), kExitConfig);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIoError), kExitInput);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kPlanFailed), kExitRuntime);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kInvalidArgument), kExitRuntime);
  const nlohmann::json json = ErrorJson(ErrorCode::kIoError, kExitInput, "missing");
  EXPECT_EQ(json.at("error").at("exit_code"), kExitInput);
  EXPECT_EQ(json.at("error").at("message"), "missing");
}

TEST(LoadRunConfig, MissingFileIsConfigErrorAndOverridesApply) {
  try {
    LoadRunConfig(fs::path("/nonexistent/occpred.json"), {});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
  const RunConfig config = LoadRunConfig(std::nullopt, {"train.options.epochs=1", "output_dir=elsewhere"});
  EXPECT_EQ(config.train.options.epochs, 1);
  EXPECT_EQ(config.output_dir, "elsewhere");
}

TEST(StoredConfig, OmitsOutputDirectory) {
  RunConfig a;
  RunConfig b;
  b.output_dir = "somewhere/else";
  EXPECT_FALSE(StoredConfig(a).contains("output_dir"));
  EXPECT_EQ(StoredConfig(a), StoredConfig(b));
}

TEST_F(CliTest, DatasetGenRerunGivesIdenticalManifestHash) {
  const RunConfig config = SmallRunConfig();
  DatasetGen(config, root_ / "a");
  DatasetGen(config, root_ / "b");
  EXPECT_EQ(ManifestHash(root_ / "a"), ManifestHash(root_ / "b"));
  EXPECT_TRUE(VerifyManifest(root_ / "a").empty());
}

TEST_F(CliTest, EvalOracleHasPerfectPrecisionAndRecall) {
  RunConfig config = SmallRunConfig();
  DatasetGen(config, root_ / "ds");
  config.eval.dataset = (root_ / "ds").string();
  config.eval.predictor = "ORACLE";
  config.eval.split = "train";
  EvalPredictor(config, root_ / "eval");
  std::ifstream in(root_ / "eval" / "report.json");
  const nlohmann::json report = nlohmann::json::parse(in);
  EXPECT_DOUBLE_EQ(report.at("precision").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(report.at("recall").get<double>(), 1.0);
  EXPECT_TRUE(VerifyManifest(root_ / "eval").empty());
}

TEST_F(CliTest, TrainMissingDatasetIsInputError) {
  RunConfig config = SmallRunConfig();
  config.train.dataset = (root_ / "absent").string();
  try {
    TrainModel(config, root_ / "train");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(ExitCodeFor(e.code()), kExitInput);
  }
}

TEST_F(CliTest, BenchAllFreeRowsMatchAggressiveRows) {
  const RunConfig config = SmallRunConfig();
  Bench(config, root_ / "bench");
  std::ifstream in(root_ / "bench" / "episodes.csv");
  std::string header;
  std::getline(in, header);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  // Everything after the scheme column must agree.
  const auto tail = [](const std::string& line) { return line.substr(line.find(',')); };
  for (std::size_t n = 0; n < lines.size(); n += 3) {
    EXPECT_EQ(lines[n].rfind("AGGRESSIVE,", 0), 0u);
    EXPECT_EQ(tail(lines[n]), tail(lines[n + 1]));
  }
}

// Runs the installed executable and returns its exit status.
int RunCli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string("\"") + OCCPRED_CLI_EXE + "\" " + args + " >\"" + (dir / "stdout").string() +
                          "\" 2>\"" + (dir / "stderr").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TEST_F(CliTest, ExecutableReportsErrorsAsJsonWithExitCodes) {
  EXPECT_EQ(RunCli("train --set bogus_key=1", root_), kExitConfig);
  EXPECT_NE(ReadText(root_ / "stderr").find("\"exit_code\":2"), std::string::npos);
  EXPECT_EQ(RunCli("train --config \"" + (root_ / "absent.json").string() + "\"", root_), kExitConfig);
  EXPECT_EQ(RunCli("train --set train.dataset=\"" + (root_ / "absent").string() + "\" -o \"" +
                       (root_ / "out").string() + "\"",
                   root_),
            kExitInput);
  EXPECT_EQ(RunCli("inspect \"" + (root_ / "absent.ocgr").string() + "\"", root_), kExitInput);
  EXPECT_EQ(RunCli("no-such-command", root_), kExitConfig);
}

TEST_F(CliTest, ExecutablePrintsManifestHash) {
  const fs::path out = root_ / "scenes";
  ASSERT_EQ(RunCli("scene-gen --set scenes.count=1 --set scenes.spec.extents=[4.0,4.0,2.0] "
                   "--set scenes.spec.obstacle_count=2 -o \"" + out.string() + "\"",
                   root_),
            kExitOk)
      << ReadText(root_ / "stderr");
  const nlohmann::json line = nlohmann::json::parse(ReadText(root_ / "stdout"));
  EXPECT_EQ(line.at("manifest_sha256"), ManifestHash(out));
  EXPECT_TRUE(VerifyManifest(out).empty());
}

}  // namespace
}  // namespace occpred::cli
