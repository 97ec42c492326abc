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

#include "occpred/config/run_config.h"

#include "occpred/common/binary_io.h"
#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/common/rng.h"
#include "occpred/scenegen/scene_io.h"

namespace occpred {
namespace {

// Sections must not carry seeds: every seed derives from the root seed.
const nlohmann::json& NoSeed(const nlohmann::json& json, const std::string& context) {
  Require(!json.is_object() || !json.contains("seed"), ErrorCode::kConfigError,
          context + ": seeds derive from the root 'seed' and cannot be set per section");
  return json;
}

nlohmann::json WithoutSeed(nlohmann::json json) {
  json.erase("seed");
  return json;
}

const nlohmann::json& Section(const nlohmann::json& json, const char* key) {
  const nlohmann::json& s = json.at(key);
  Require(s.is_object(), ErrorCode::kConfigError, std::string("'") + key + "' must be an object");
  return s;
}

template <typename Fn>
void Validated(const std::string& context, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    Throw(ErrorCode::kConfigError, context + ": " + e.what());
  }
}

}  // namespace

RunConfig::RunConfig() {
  SceneSpec box;
  box.kind = SceneKind::kBoxField;
  SceneSpec room;
  room.kind = SceneKind::kSquareRoom;
  dataset.templates = {box, box, room};
}

RunConfig RunConfigFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"output_dir", "seed", "scenes", "dataset", "train", "eval", "bench"}, "config");
  RunConfig c;
  ReadOptional(json, "output_dir", c.output_dir);
  ReadOptional(json, "seed", c.seed);
  Require(!c.output_dir.empty(), ErrorCode::kConfigError, "output_dir must not be empty");

  if (json.contains("scenes")) {
    const nlohmann::json& s = Section(json, "scenes");
    RejectUnknownKeys(s, {"spec", "count"}, "scenes");
    if (s.contains("spec")) c.scenes.spec = SceneSpecFromJson(NoSeed(s.at("spec"), "scenes.spec"));
    ReadOptional(s, "count", c.scenes.count);
    Require(c.scenes.count >= 1, ErrorCode::kConfigError, "scenes.count must be >= 1");
    Validated("scenes.spec", [&] { c.scenes.spec.Validate(); });
  }
  if (json.contains("dataset")) {
    const nlohmann::json& d = Section(json, "dataset");
    RejectUnknownKeys(d, {"templates", "scene_count", "occlusion", "noise", "params"}, "dataset");
    if (d.contains("templates")) {
      Require(d.at("templates").is_array() && !d.at("templates").empty(), ErrorCode::kConfigError,
              "dataset.templates must be a non-empty array");
      c.dataset.templates.clear();
      for (const nlohmann::json& t : d.at("templates")) {
        c.dataset.templates.push_back(SceneSpecFromJson(NoSeed(t, "dataset.templates")));
        Validated("dataset.templates", [&] { c.dataset.templates.back().Validate(); });
      }
    }
    ReadOptional(d, "scene_count", c.dataset.scene_count);
    Require(c.dataset.scene_count >= 1, ErrorCode::kConfigError, "dataset.scene_count must be >= 1");
    if (d.contains("occlusion")) c.dataset.occlusion = OcclusionParamsFromJson(d.at("occlusion"));
    if (d.contains("noise")) c.dataset.noise = NoiseParamsFromJson(NoSeed(d.at("noise"), "dataset.noise"));
    if (d.contains("params")) c.dataset.params = DatasetParamsFromJson(NoSeed(d.at("params"), "dataset.params"));
  }
  if (json.contains("train")) {
    const nlohmann::json& t = Section(json, "train");
    RejectUnknownKeys(t, {"dataset", "model", "options", "max_train_pairs"}, "train");
    ReadOptional(t, "dataset", c.train.dataset);
    if (t.contains("model")) c.train.model = OPNetConfigFromJson(NoSeed(t.at("model"), "train.model"));
    if (t.contains("options")) c.train.options = TrainOptionsFromJson(NoSeed(t.at("options"), "train.options"));
    ReadOptional(t, "max_train_pairs", c.train.max_train_pairs);
    Require(c.train.max_train_pairs >= 0, ErrorCode::kConfigError, "train.max_train_pairs must be >= 0");
    Validated("train.model", [&] { c.train.model.Validate(); });
  }
  if (json.contains("eval")) {
    const nlohmann::json& e = Section(json, "eval");
    RejectUnknownKeys(e, {"dataset", "split", "predictor", "checkpoint", "threshold"}, "eval");
    ReadOptional(e, "dataset", c.eval.dataset);
    ReadOptional(e, "split", c.eval.split);
    ReadOptional(e, "predictor", c.eval.predictor);
    ReadOptional(e, "checkpoint", c.eval.checkpoint);
    ReadOptional(e, "threshold", c.eval.threshold);
    Validated("eval.split", [&] { SplitFromString(c.eval.split); });
    if (c.eval.predictor != "OPNET") Validated("eval.predictor", [&] { BaselineKindFromString(c.eval.predictor); });
    Require(c.eval.threshold > 0.0 && c.eval.threshold < 1.0, ErrorCode::kConfigError,
            "eval.threshold must be in (0, 1)");
  }
  if (json.contains("bench")) {
    const nlohmann::json& b = Section(json, "bench");
    RejectUnknownKeys(b, {"scene", "trials", "schemes", "episode", "checkpoint", "export_paths"}, "bench");
    nlohmann::json core = nlohmann::json::object();
    for (const char* key : {"scene", "trials", "schemes", "episode"}) {
      if (b.contains(key)) core[key] = b.at(key);
    }
    if (core.contains("scene")) NoSeed(core.at("scene"), "bench.scene");
    // Defaults of the benchmark scene differ from a plain SceneSpec; merge
    // user keys over them.
    nlohmann::json scene = ToJson(c.bench.config.scene);
    if (core.contains("scene")) scene.update(core.at("scene"));
    core["scene"] = WithoutSeed(scene);
    c.bench.config = BenchmarkConfigFromJson(core);
    ReadOptional(b, "checkpoint", c.bench.checkpoint);
    ReadOptional(b, "export_paths", c.bench.export_paths);
  }
  return c;
}

nlohmann::json ToJson(const RunConfig& c) {
  nlohmann::json templates = nlohmann::json::array();
  for (const SceneSpec& t : c.dataset.templates) templates.push_back(WithoutSeed(ToJson(t)));
  nlohmann::json bench = WithoutSeed(ToJson(c.bench.config));
  bench["scene"] = WithoutSeed(bench.at("scene"));
  bench["checkpoint"] = c.bench.checkpoint;
  bench["export_paths"] = c.bench.export_paths;
  return {{"output_dir", c.output_dir},
          {"seed", c.seed},
          {"scenes", {{"spec", WithoutSeed(ToJson(c.scenes.spec))}, {"count", c.scenes.count}}},
          {"dataset",
           {{"templates", templates},
            {"scene_count", c.dataset.scene_count},
            {"occlusion", ToJson(c.dataset.occlusion)},
            {"noise", WithoutSeed(ToJson(c.dataset.noise))},
            {"params", WithoutSeed(ToJson(c.dataset.params))}}},
          {"train",
           {{"dataset", c.train.dataset},
            {"model", WithoutSeed(ToJson(c.train.model))},
            {"options", WithoutSeed(ToJson(c.train.options))},
            {"max_train_pairs", c.train.max_train_pairs}}},
          {"eval",
           {{"dataset", c.eval.dataset},
            {"split", c.eval.split},
            {"predictor", c.eval.predictor},
            {"checkpoint", c.eval.checkpoint},
            {"threshold", c.eval.threshold}}},
          {"bench", bench}};
}

void ApplyOverride(nlohmann::json& document, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  Require(eq != std::string_view::npos && eq > 0, ErrorCode::kConfigError,
          "override '" + std::string(assignment) + "' is not key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  nlohmann::json* node = &document;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    Require(!part.empty(), ErrorCode::kConfigError, "override key '" + key + "' has an empty component");
    if (!node->is_object()) *node = nlohmann::json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

nlohmann::json ReadConfigDocument(const std::filesystem::path& path) {
  const std::string text = ReadFileText(path);
  nlohmann::json json = nlohmann::json::parse(text, nullptr, false);
  Require(!json.is_discarded(), ErrorCode::kConfigError, "config " + path.string() + " is not valid JSON");
  return json;
}

std::filesystem::path ResolveOutputDir(const std::string& output_dir, const std::string& output_root) {
  const std::filesystem::path dir(output_dir);
  if (output_root.empty() || dir.is_absolute()) return dir;
  return std::filesystem::path(output_root) / dir;
}

std::uint64_t DerivedSeed(const RunConfig& config, SeedStream stream) {
  return DeriveSeed(config.seed, static_cast<std::uint64_t>(stream));
}

std::vector<SceneSpec> DatasetSceneSpecs(const RunConfig& config) {
  std::vector<SceneSpec> specs;
  const std::uint64_t root = DerivedSeed(config, SeedStream::kDatasetScenes);
  for (int i = 0; i < config.dataset.scene_count; ++i) {
    SceneSpec spec = config.dataset.templates[static_cast<std::size_t>(i) % config.dataset.templates.size()];
    spec.seed = DeriveSeed(root, static_cast<std::uint64_t>(i));
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace occpred
