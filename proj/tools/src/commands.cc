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

#include "occpred/cli/commands.h"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <map>
#include <memory>
#include <sstream>

#include "occpred/common/binary_io.h"
#include "occpred/common/hash.h"
#include "occpred/common/version.h"
#include "occpred/navsim/benchmark.h"
#include "occpred/nn/weights_io.h"
#include "occpred/occlusion/dataset.h"
#include "occpred/predictor/evaluate.h"
#include "occpred/predictor/opnet.h"
#include "occpred/predictor/trainer.h"
#include "occpred/scenegen/scene_io.h"
#include "occpred/voxel/grid_io.h"

namespace occpred::cli {
namespace {

namespace fs = std::filesystem;

void RequireInput(const std::string& what, const std::string& path) {
  Require(!path.empty(), ErrorCode::kConfigError, what + " path is not set");
  Require(fs::exists(path), ErrorCode::kIoError, what + " '" + path + "' does not exist");
}

void PrepareOutput(const fs::path& out) {
  fs::create_directories(out);
  // Stale files from an earlier run would otherwise end up in the manifest.
  fs::remove(out / kManifestFile);
}

std::string Text(const nlohmann::json& json) { return json.dump(2) + "\n"; }

std::string SafeName(std::string name) {
  for (char& ch : name) {
    if (ch == '(' || ch == ')') ch = '_';
  }
  while (!name.empty() && name.back() == '_') name.pop_back();
  return name;
}

std::map<std::string, std::uint64_t> Seeds(const RunConfig& config,
                                           std::initializer_list<std::pair<const char*, SeedStream>> streams) {
  std::map<std::string, std::uint64_t> seeds{{"root", config.seed}};
  for (const auto& [name, stream] : streams) seeds[name] = DerivedSeed(config, stream);
  return seeds;
}

std::string Summary(const OccupancyGrid& grid) {
  const GridDims& d = grid.dims();
  const Eigen::Vector3d& o = grid.origin();
  std::ostringstream out;
  out << "dims: " << d.x << " x " << d.y << " x " << d.z << " (" << grid.cell_count() << " cells)\n"
      << "resolution: " << grid.resolution() << " m\n"
      << "origin: " << o.x() << " " << o.y() << " " << o.z() << "\n"
      << "known: " << grid.CountKnown() << "\n"
      << "occupied (> 0.5): " << grid.CountOccupied(kDefaultOccupancyThreshold) << "\n";
  return out.str();
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
      return kExitConfig;
    case ErrorCode::kIoError:
      return kExitInput;
    default:
      return kExitRuntime;
  }
}

nlohmann::json ErrorJson(ErrorCode code, int exit_code, const std::string& message) {
  return {{"error", {{"code", std::string(ToString(code))}, {"exit_code", exit_code}, {"message", message}}}};
}

RunConfig LoadRunConfig(const std::optional<fs::path>& path, const std::vector<std::string>& overrides) {
  nlohmann::json doc = nlohmann::json::object();
  if (path) {
    Require(fs::exists(*path), ErrorCode::kConfigError, "config file '" + path->string() + "' does not exist");
    doc = ReadConfigDocument(*path);
  }
  for (const std::string& o : overrides) ApplyOverride(doc, o);
  return RunConfigFromJson(doc);
}

fs::path OutputDir(const RunConfig& config, const std::optional<fs::path>& out_override) {
  const char* root = std::getenv(kOutputRootEnv);
  const std::string dir = out_override ? out_override->string() : config.output_dir;
  return ResolveOutputDir(dir, root != nullptr ? root : "");
}

nlohmann::json StoredConfig(const RunConfig& config) {
  nlohmann::json json = ToJson(config);
  json.erase("output_dir");
  return json;
}

Manifest SceneGen(const RunConfig& config, const fs::path& out) {
  PrepareOutput(out);
  const std::uint64_t root = DerivedSeed(config, SeedStream::kScenes);
  for (int i = 0; i < config.scenes.count; ++i) {
    SceneSpec spec = config.scenes.spec;
    spec.seed = DeriveSeed(root, static_cast<std::uint64_t>(i));
    const Scene scene = GenerateScene(spec);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "scene_%03d", i);
    WriteScene(out / stem, scene);
    spdlog::info("scene {}: occupied fraction {:.3f}", stem, OccupiedFraction(scene));
  }
  return WriteManifest(out, "scene-gen", StoredConfig(config), Seeds(config, {{"scenes", SeedStream::kScenes}}));
}

Manifest DatasetGen(const RunConfig& config, const fs::path& out) {
  PrepareOutput(out);
  const nlohmann::json stored = StoredConfig(config);
  DatasetParams params = config.dataset.params;
  params.seed = DerivedSeed(config, SeedStream::kDataset);
  NoiseParams noise = config.dataset.noise;
  noise.seed = DerivedSeed(config, SeedStream::kNoise);
  const DatasetManifest manifest =
      GenerateDataset(DatasetSceneSpecs(config), config.dataset.occlusion, noise, params, out,
                      {{"config_sha256", Sha256Hex(Text(stored))}, {"code_version", std::string(CodeVersion())}});
  spdlog::info("dataset: {} pairs ({} skipped pairs, {} skipped scenes)", manifest.entries.size(),
               manifest.skipped_pairs, manifest.skipped_scenes);
  return WriteManifest(out, "dataset-gen", stored,
                       Seeds(config, {{"dataset_scenes", SeedStream::kDatasetScenes},
                                      {"dataset", SeedStream::kDataset},
                                      {"noise", SeedStream::kNoise}}));
}

Manifest TrainModel(const RunConfig& config, const fs::path& out) {
  RequireInput("train.dataset", config.train.dataset);
  const fs::path dataset(config.train.dataset);
  const DatasetManifest manifest = ReadDatasetManifest(dataset);
  std::vector<DataPair> train_pairs = LoadPairs(dataset, manifest, Split::kTrain);
  const std::vector<DataPair> validation = LoadPairs(dataset, manifest, Split::kValidation);
  if (config.train.max_train_pairs > 0 && static_cast<int>(train_pairs.size()) > config.train.max_train_pairs) {
    train_pairs.resize(static_cast<std::size_t>(config.train.max_train_pairs));
  }
  Require(!train_pairs.empty(), ErrorCode::kIoError, "dataset has no training pairs");
  Require(train_pairs.front().target.dims() == config.train.model.block_dims, ErrorCode::kConfigError,
          "train.model.block_dims " + ToString(config.train.model.block_dims) + " does not match the dataset blocks " +
              ToString(train_pairs.front().target.dims()));

  PrepareOutput(out);
  OPNetConfig model_config = config.train.model;
  model_config.seed = DerivedSeed(config, SeedStream::kModel);
  TrainOptions options = config.train.options;
  options.seed = DerivedSeed(config, SeedStream::kTraining);
  options.checkpoint = out / "weights.opnw";
  std::vector<TrainingExample> examples;
  examples.reserve(train_pairs.size());
  for (const DataPair& p : train_pairs) examples.push_back(MakeExample(p, options.loss, options.threshold));

  OPNetModel model = OPNetModel::Build(model_config);
  spdlog::info("training on {} pairs ({} validation), {} parameters", examples.size(), validation.size(),
               model.ParameterCount());
  const TrainingLog log = Train(model, examples, validation, options);
  WriteFileText(out / "training_log.csv", TrainingLogCsv(log));
  WriteFileText(out / "model.json", Text(ToJson(model.config())));
  nlohmann::json metrics = {{"best_epoch", log.best_epoch},
                            {"train_pairs", examples.size()},
                            {"validation_pairs", validation.size()}};
  if (!validation.empty()) {
    const OPNetPredictor predictor(std::make_shared<const OPNetModel>(std::move(model)));
    try {
      metrics["validation"] = ToJson(Evaluate(validation, predictor, options.threshold), false);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedMetrics) throw;
      metrics["validation"] = nullptr;
    }
  }
  WriteFileText(out / "metrics.json", Text(metrics));
  return WriteManifest(out, "train", StoredConfig(config),
                       Seeds(config, {{"model", SeedStream::kModel}, {"training", SeedStream::kTraining}}));
}

Manifest EvalPredictor(const RunConfig& config, const fs::path& out) {
  const EvalSection& e = config.eval;
  RequireInput("eval.dataset", e.dataset);
  const DatasetManifest manifest = ReadDatasetManifest(e.dataset);
  const std::vector<DataPair> pairs = LoadPairs(e.dataset, manifest, SplitFromString(e.split));
  Require(!pairs.empty(), ErrorCode::kIoError, "dataset split '" + e.split + "' is empty");
  EvalReport report;
  if (e.predictor == "OPNET") {
    RequireInput("eval.checkpoint", e.checkpoint);
    const OPNetPredictor predictor(
        std::make_shared<const OPNetModel>(OPNetModel::Load(e.checkpoint, pairs.front().target.dims())));
    report = Evaluate(pairs, predictor, e.threshold);
  } else if (e.predictor == "ORACLE") {
    report = Evaluate(pairs, OracleProvider(), e.threshold);
  } else {
    report = Evaluate(pairs, *MakeBaseline(BaselineKindFromString(e.predictor)), e.threshold);
  }
  PrepareOutput(out);
  WriteFileText(out / "report.json", Text(ToJson(report, false)));
  WriteFileText(out / "timing.json", Text({{"mean_inference_ms", report.mean_inference_ms}}));
  return WriteManifest(out, "eval", StoredConfig(config), Seeds(config, {}), {"timing.json"});
}

Manifest Bench(const RunConfig& config, const fs::path& out) {
  BenchmarkConfig bench = config.bench.config;
  bench.seed = DerivedSeed(config, SeedStream::kBench);
  std::shared_ptr<const OPNetModel> model;
  if (!config.bench.checkpoint.empty()) {
    RequireInput("bench.checkpoint", config.bench.checkpoint);
    model = std::make_shared<const OPNetModel>(
        OPNetModel::Load(config.bench.checkpoint, bench.episode.prediction.block_dims));
  }
  for (const Scheme& s : bench.schemes) {
    Require(s.predictor != "OPNET" || model != nullptr, ErrorCode::kConfigError,
            "PREDICTED(OPNET) needs bench.checkpoint");
  }
  PrepareOutput(out);
  const BenchmarkTable table = RunBenchmark(bench, DefaultPredictorFactory(model));
  WriteFileText(out / "episodes.csv", BenchmarkCsv(table));
  WriteFileText(out / "table.json", Text(ToJson(table)));
  for (const SchemeSummary& s : table.summaries) {
    spdlog::info("{}: success {:.1f}% over {} episodes", s.scheme, s.success_rate, s.episodes);
  }
  if (config.bench.export_paths) {
    fs::create_directories(out / "paths");
    for (const EpisodeRow& row : table.rows) {
      char name[96];
      std::snprintf(name, sizeof(name), "%s_trial%03d.ply", SafeName(row.scheme).c_str(), row.trial);
      WritePointsPly(out / "paths" / name, row.result.executed_path);
    }
  }
  return WriteManifest(out, "bench", StoredConfig(config), Seeds(config, {{"bench", SeedStream::kBench}}));
}

std::string Inspect(const fs::path& file, const InspectOptions& options) {
  Require(fs::exists(file), ErrorCode::kIoError, "'" + file.string() + "' does not exist");
  std::ostringstream out;
  const std::string ext = file.extension().string();
  if (ext == ".ocgr") {
    const OccupancyGrid grid = ReadGrid(file);
    out << "voxel grid " << file.string() << "\n" << Summary(grid);
    if (options.pgm) {
      const std::string axis = options.slice_axis.value_or("z");
      Require(axis == "x" || axis == "y" || axis == "z", ErrorCode::kConfigError, "slice axis must be x, y or z");
      const SliceAxis a = axis == "x" ? SliceAxis::kX : axis == "y" ? SliceAxis::kY : SliceAxis::kZ;
      const int extent = a == SliceAxis::kX ? grid.dims().x : a == SliceAxis::kY ? grid.dims().y : grid.dims().z;
      const int index = options.slice_index.value_or(extent / 2);
      Require(index >= 0 && index < extent, ErrorCode::kConfigError, "slice index out of range");
      WritePgmSlice(*options.pgm, grid, a, index);
      out << "wrote " << axis << "=" << index << " slice to " << options.pgm->string() << "\n";
    }
    if (options.ply) {
      WriteOccupiedPly(*options.ply, grid);
      out << "wrote occupied cells to " << options.ply->string() << "\n";
    }
    return out.str();
  }
  Require(!options.pgm && !options.ply, ErrorCode::kConfigError, "PGM/PLY export needs a voxel (.ocgr) file");
  if (ext == ".opnw") {
    const std::vector<nn::ConvLayer> layers = nn::ReadWeights(file);
    std::int64_t params = 0;
    out << "weights " << file.string() << ": " << layers.size() << " layers\n";
    for (const nn::ConvLayer& l : layers) {
      std::int64_t n = l.conv.weight.numel() + l.conv.bias.numel();
      if (l.norm) n += l.norm->gamma.numel() + l.norm->beta.numel();
      params += n;
      out << "  " << l.conv.id << ": " << l.spec.in_channels << " -> " << l.spec.out_channels << ", kernel "
          << l.spec.kernel << ", stride " << l.spec.stride << ", dilation " << l.spec.dilation
          << (l.norm ? ", norm" : "") << " (" << n << " params)\n";
    }
    out << "trainable parameters: " << params << "\n";
    return out.str();
  }
  Require(ext == ".json", ErrorCode::kIoError, "unsupported file type '" + ext + "'");
  const nlohmann::json json = nlohmann::json::parse(ReadFileText(file), nullptr, false);
  Require(!json.is_discarded() && json.is_object(), ErrorCode::kIoError, "'" + file.string() + "' is not a JSON object");
  if (json.contains("command") && json.contains("files")) {
    const Manifest m = ManifestFromJson(json);
    out << "run manifest: command " << m.command << ", code " << m.code_version << "\n"
        << "config sha256: " << m.config_sha256 << "\n";
    for (const auto& [name, seed] : m.seeds) out << "seed " << name << ": " << seed << "\n";
    out << m.files.size() << " hashed files, " << m.unhashed.size() << " unhashed\n";
    const std::vector<std::string> bad = VerifyManifest(file.parent_path());
    out << (bad.empty() ? "all hashes match" : std::to_string(bad.size()) + " files do not match") << "\n";
    for (const std::string& b : bad) out << "  mismatch: " << b << "\n";
    return out.str();
  }
  if (json.contains("entries") && json.contains("train_scenes")) {
    const DatasetManifest m = DatasetManifestFromJson(json);
    int train = 0;
    double ratio = 0.0;
    for (const DatasetEntry& e : m.entries) {
      train += e.split == Split::kTrain;
      ratio += e.known_ratio;
    }
    out << "dataset manifest: " << m.entries.size() << " pairs (" << train << " train, "
        << m.entries.size() - static_cast<std::size_t>(train) << " validation)\n"
        << "scenes: " << m.train_scenes.size() << " train, " << m.validation_scenes.size() << " validation\n"
        << "skipped: " << m.skipped_pairs << " pairs, " << m.skipped_scenes << " scenes\n";
    if (!m.entries.empty()) out << "mean known ratio: " << ratio / static_cast<double>(m.entries.size()) << "\n";
    return out.str();
  }
  if (json.contains("spec") && json.contains("start") && json.contains("goal")) {
    out << "scene sidecar: " << json.at("spec").dump() << "\nstart " << json.at("start").dump() << " goal "
        << json.at("goal").dump() << "\n";
    return out.str();
  }
  out << "JSON object with keys:";
  for (const auto& item : json.items()) out << " " << item.key();
  out << "\n";
  return out.str();
}

}  // namespace occpred::cli
