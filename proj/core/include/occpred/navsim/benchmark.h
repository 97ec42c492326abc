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

#ifndef OCCPRED_NAVSIM_BENCHMARK_H_
#define OCCPRED_NAVSIM_BENCHMARK_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "occpred/navsim/episode.h"
#include "occpred/navsim/planner.h"
#include "occpred/predictor/opnet.h"
#include "occpred/predictor/predictor.h"
#include "occpred/scenegen/scene.h"

namespace occpred {

struct BenchmarkConfig {
  SceneSpec scene;  // per-trial seeds are derived from `seed`
  int trials = 20;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes;
  EpisodeConfig episode;

  BenchmarkConfig();
  void Validate() const;
};

nlohmann::json ToJson(const BenchmarkConfig& config);
BenchmarkConfig BenchmarkConfigFromJson(const nlohmann::json& json);

// Seeds of trial `trial`; every scheme sees the same scene and sensor noise.
std::uint64_t TrialSceneSeed(std::uint64_t root, int trial);
std::uint64_t TrialEpisodeSeed(std::uint64_t root, int trial);

struct EpisodeRow {
  std::string scheme;
  int trial = 0;
  std::uint64_t scene_seed = 0;
  std::uint64_t episode_seed = 0;
  EpisodeResult result;
};

// Travel time, trajectory length and emergency stops are averaged over the
// successful episodes only; they are empty when no episode succeeded.
struct SchemeSummary {
  std::string scheme;
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;  // percent
  std::optional<double> mean_travel_time;
  std::optional<double> mean_trajectory_length;
  std::optional<double> mean_emergency_stops;
  double mean_emergency_stops_all = 0.0;  // over every episode
  int collisions = 0;
  int timeouts = 0;
  int stuck = 0;
};

struct BenchmarkTable {
  std::vector<EpisodeRow> rows;  // trial-major, schemes in configured order
  std::vector<SchemeSummary> summaries;
};

// Builds the predictor for a PREDICTED scheme on a given scene.
using PredictorFactory = std::function<std::unique_ptr<Predictor>(const std::string& id, const Scene& scene)>;

// ORACLE from the scene's ground truth, the fixed baselines, FAILING, and
// OPNET when `model` is given (kInvalidArgument otherwise).
PredictorFactory DefaultPredictorFactory(std::shared_ptr<const OPNetModel> model = nullptr);

// Aggregates the rows of one scheme (the re-aggregation used by RunBenchmark).
SchemeSummary Summarize(const std::string& scheme, const std::vector<EpisodeRow>& rows);

// Runs every (trial, scheme) episode, concurrently across episodes. Results
// do not depend on the thread count.
BenchmarkTable RunBenchmark(const BenchmarkConfig& config, const PredictorFactory& factory);

// One header line plus one line per episode row.
std::string BenchmarkCsv(const BenchmarkTable& table);
// Aggregate table with the averaging convention recorded as metadata.
nlohmann::json ToJson(const BenchmarkTable& table);

}  // namespace occpred

#endif  // OCCPRED_NAVSIM_BENCHMARK_H_
