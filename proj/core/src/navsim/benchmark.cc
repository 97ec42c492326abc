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

#include "occpred/navsim/benchmark.h"

#include <charconv>
#include <exception>
#include <sstream>

#include "occpred/common/error.h"
#include "occpred/common/json_util.h"
#include "occpred/common/parallel.h"
#include "occpred/common/rng.h"
#include "occpred/scenegen/scene_io.h"

namespace occpred {
namespace {

constexpr std::uint64_t kSceneStream = 0;
constexpr std::uint64_t kEpisodeStream = 1ULL << 32;

// Shortest representation that round-trips.
std::string FormatDouble(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

nlohmann::json Optional(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

}  // namespace

BenchmarkConfig::BenchmarkConfig() {
  scene.kind = SceneKind::kBoxField;
  scene.extents = Eigen::Vector3d(10.0, 10.0, 2.0);
  scene.obstacle_count = 12;
  scene.passage_clearance = 0.35;
  schemes = {SchemeFromString("AGGRESSIVE"), SchemeFromString("CONSERVATIVE"), SchemeFromString("PREDICTED(ORACLE)")};
}

void BenchmarkConfig::Validate() const {
  scene.Validate();
  Require(trials >= 1, ErrorCode::kInvalidArgument, "benchmark: trials must be >= 1");
  Require(!schemes.empty(), ErrorCode::kInvalidArgument, "benchmark: at least one scheme is required");
  episode.Validate();
}

nlohmann::json ToJson(const BenchmarkConfig& c) {
  nlohmann::json schemes = nlohmann::json::array();
  for (const Scheme& s : c.schemes) schemes.push_back(ToString(s));
  return {{"scene", ToJson(c.scene)},
          {"trials", c.trials},
          {"seed", c.seed},
          {"schemes", schemes},
          {"episode", ToJson(c.episode)}};
}

BenchmarkConfig BenchmarkConfigFromJson(const nlohmann::json& json) {
  RejectUnknownKeys(json, {"scene", "trials", "seed", "schemes", "episode"}, "bench");
  BenchmarkConfig c;
  if (json.contains("scene")) c.scene = SceneSpecFromJson(json.at("scene"));
  ReadOptional(json, "trials", c.trials);
  ReadOptional(json, "seed", c.seed);
  if (json.contains("schemes")) {
    std::vector<std::string> names;
    ReadOptional(json, "schemes", names);
    c.schemes.clear();
    for (const std::string& name : names) {
      try {
        c.schemes.push_back(SchemeFromString(name));
      } catch (const Error& e) {
        Throw(ErrorCode::kConfigError, e.what());
      }
    }
  }
  if (json.contains("episode")) c.episode = EpisodeConfigFromJson(json.at("episode"));
  try {
    c.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigError, e.what());
  }
  return c;
}

std::uint64_t TrialSceneSeed(std::uint64_t root, int trial) {
  return DeriveSeed(root, kSceneStream + static_cast<std::uint64_t>(trial));
}

std::uint64_t TrialEpisodeSeed(std::uint64_t root, int trial) {
  return DeriveSeed(root, kEpisodeStream + static_cast<std::uint64_t>(trial));
}

PredictorFactory DefaultPredictorFactory(std::shared_ptr<const OPNetModel> model) {
  return [model](const std::string& id, const Scene& scene) -> std::unique_ptr<Predictor> {
    if (id == "ORACLE") return std::make_unique<OraclePredictor>(scene.grid);
    if (id == "FAILING") return std::make_unique<FailingPredictor>();
    if (id == "OPNET") {
      Require(model != nullptr, ErrorCode::kInvalidArgument, "PREDICTED(OPNET) needs a trained model");
      return std::make_unique<OPNetPredictor>(model);
    }
    return MakeBaseline(BaselineKindFromString(id));
  };
}

SchemeSummary Summarize(const std::string& scheme, const std::vector<EpisodeRow>& rows) {
  SchemeSummary s;
  s.scheme = scheme;
  double time = 0.0;
  double length = 0.0;
  double stops = 0.0;
  double stops_all = 0.0;
  for (const EpisodeRow& row : rows) {
    if (row.scheme != scheme) continue;
    const EpisodeResult& r = row.result;
    ++s.episodes;
    stops_all += r.emergency_stops;
    switch (r.failure) {
      case FailureCause::kNone:
        break;
      case FailureCause::kCollision:
        ++s.collisions;
        break;
      case FailureCause::kTimeout:
        ++s.timeouts;
        break;
      case FailureCause::kStuck:
        ++s.stuck;
        break;
    }
    if (!r.success) continue;
    ++s.successes;
    time += r.travel_time;
    length += r.trajectory_length;
    stops += r.emergency_stops;
  }
  if (s.episodes > 0) {
    s.success_rate = 100.0 * s.successes / s.episodes;
    s.mean_emergency_stops_all = stops_all / s.episodes;
  }
  if (s.successes > 0) {
    s.mean_travel_time = time / s.successes;
    s.mean_trajectory_length = length / s.successes;
    s.mean_emergency_stops = stops / s.successes;
  }
  return s;
}

BenchmarkTable RunBenchmark(const BenchmarkConfig& config, const PredictorFactory& factory) {
  config.Validate();
  const int trials = config.trials;
  const int schemes = static_cast<int>(config.schemes.size());

  std::vector<Scene> scenes(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials) * static_cast<std::size_t>(schemes));
  ParallelFor(trials, [&](std::int64_t t) {
    try {
      SceneSpec spec = config.scene;
      spec.seed = TrialSceneSeed(config.seed, static_cast<int>(t));
      scenes[static_cast<std::size_t>(t)] = GenerateScene(spec);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  });
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BenchmarkTable table;
  table.rows.resize(errors.size());
  ParallelFor(static_cast<std::int64_t>(errors.size()), [&](std::int64_t n) {
    const std::size_t idx = static_cast<std::size_t>(n);
    const int trial = static_cast<int>(n / schemes);
    const Scheme& scheme = config.schemes[static_cast<std::size_t>(n % schemes)];
    try {
      const Scene& scene = scenes[static_cast<std::size_t>(trial)];
      std::unique_ptr<Predictor> predictor;
      if (scheme.kind == SchemeKind::kPredicted) predictor = factory(scheme.predictor, scene);
      EpisodeRow& row = table.rows[idx];
      row.scheme = ToString(scheme);
      row.trial = trial;
      row.scene_seed = TrialSceneSeed(config.seed, trial);
      row.episode_seed = TrialEpisodeSeed(config.seed, trial);
      row.result = RunEpisode(scene, scheme, config.episode, predictor.get(), row.episode_seed);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  });
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const Scheme& scheme : config.schemes) table.summaries.push_back(Summarize(ToString(scheme), table.rows));
  return table;
}

std::string BenchmarkCsv(const BenchmarkTable& table) {
  std::ostringstream out;
  out << "scheme,trial,scene_seed,episode_seed,success,failure,travel_time,trajectory_length,emergency_stops,steps\n";
  for (const EpisodeRow& row : table.rows) {
    const EpisodeResult& r = row.result;
    out << row.scheme << ',' << row.trial << ',' << row.scene_seed << ',' << row.episode_seed << ','
        << (r.success ? 1 : 0) << ',' << ToString(r.failure) << ',' << FormatDouble(r.travel_time) << ','
        << FormatDouble(r.trajectory_length) << ',' << r.emergency_stops << ',' << r.steps << '\n';
  }
  return out.str();
}

nlohmann::json ToJson(const BenchmarkTable& table) {
  nlohmann::json schemes = nlohmann::json::array();
  for (const SchemeSummary& s : table.summaries) {
    schemes.push_back({{"scheme", s.scheme},
                       {"episodes", s.episodes},
                       {"successes", s.successes},
                       {"success_rate", s.success_rate},
                       {"mean_travel_time", Optional(s.mean_travel_time)},
                       {"mean_trajectory_length", Optional(s.mean_trajectory_length)},
                       {"mean_emergency_stops", Optional(s.mean_emergency_stops)},
                       {"mean_emergency_stops_all_episodes", s.mean_emergency_stops_all},
                       {"collisions", s.collisions},
                       {"timeouts", s.timeouts},
                       {"stuck", s.stuck}});
  }
  return {{"means_over", "successful_episodes"}, {"schemes", schemes}};
}

}  // namespace occpred
