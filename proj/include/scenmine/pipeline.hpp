// Copyright 2026 The scenmine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENMINE__PIPELINE_HPP_
#define SCENMINE__PIPELINE_HPP_

#include "scenmine/anomaly.hpp"
#include "scenmine/config.hpp"
#include "scenmine/scenario.hpp"
#include "scenmine/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

namespace scenmine
{

/// Malformed or inconsistent input data (tables, score files, predictions).
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct AgentRecord
{
  std::string agent_id;
  bool to_predict{false};
  double min_dist_to_predict{0.0};
  IndividualVector gt{};
  IndividualVector fe{};
  // Cleared once the anomaly column is filled.
  std::vector<double> gt_primitive;
  std::vector<double> fe_primitive;
};

struct PairRecord
{
  std::size_t i{0};  // index into ScenarioFeatureSet::agents, lower agent_id
  std::size_t j{0};
  InteractionVector gt{};    // gt_i with gt_j
  InteractionVector fe{};    // fe_i with fe_j
  InteractionVector as_i{};  // fe_i with gt_j
  InteractionVector as_j{};  // fe_j with gt_i
  double pair_anomaly{0.0};  // diagnostic, not scored
};

struct ScenarioFeatureSet
{
  std::string scenario_id;
  std::vector<AgentRecord> agents;
  std::vector<PairRecord> pairs;

  std::size_t n_predict() const;
};

/// Ground-truth and counterfactual features for every agent and gated pair. The anomaly
/// column is left at zero; primitives are kept when `keep_primitives` is set.
ScenarioFeatureSet extract_scenario_features(
  const Scenario & s, const PipelineConfig & config, bool keep_primitives = true);

struct AnomalyModels
{
  std::optional<PrimitiveModel> individual;
  std::optional<PrimitiveModel> pair;
  std::vector<std::string> warnings;
};

/// Fits on ground-truth primitives of the scenarios accepted by `fit_ids` (all when null),
/// evenly subsampled to anomaly.max_fit_samples.
AnomalyModels fit_anomaly_models(
  const std::vector<Scenario> & scenarios, const std::vector<ScenarioFeatureSet> & sets,
  const PipelineConfig & config, const std::unordered_set<std::string> * fit_ids,
  const std::string & fit_partition_id);

void apply_anomaly(
  const Scenario & s, ScenarioFeatureSet & set, const AnomalyModels & models,
  const PipelineConfig & config);

/// Pools ground-truth, counterfactual and asymmetric rows of the accepted scenarios.
FeatureNormalizer fit_normalizer(
  const std::vector<ScenarioFeatureSet> & sets, const PipelineConfig & config,
  const std::unordered_set<std::string> * fit_ids = nullptr);

struct ScenarioScores
{
  SceneScore scene;
  std::vector<TrajectoryScoreSet> agents;
};

ScenarioScores score_features(
  const ScenarioFeatureSet & set, const FeatureNormalizer & norm, const ScoreWeights & weights);

struct CorpusResult
{
  std::vector<ScenarioFeatureSet> features;
  AnomalyModels anomaly;
  FeatureNormalizer normalizer;
  std::vector<ScenarioScores> scores;
  std::vector<std::string> warnings;
};

/// Features, anomaly fit and fill, normalizer fit and scoring over a corpus. Fitting uses
/// the scenarios in `fit_ids` (all when null), recorded as `fit_partition_id`.
CorpusResult run_pipeline(
  const std::vector<Scenario> & scenarios, const PipelineConfig & config,
  const std::unordered_set<std::string> * fit_ids = nullptr,
  const std::string & fit_partition_id = "all");

void write_feature_tables(const std::string & dir, const std::vector<ScenarioFeatureSet> & sets);
std::vector<ScenarioFeatureSet> read_feature_tables(const std::string & dir);

void write_scores_jsonl(std::ostream & out, const std::vector<ScenarioScores> & scores);
std::vector<ScenarioScores> read_scores_jsonl(std::istream & in);

/// Shortest round-trip text form; "inf" and "-inf" for infinities.
std::string format_number(double v);
double parse_number(std::string_view text);

int resolve_workers(int requested);

/// fn(i) for i in [0, n) on up to `workers` threads; results keep index order. The first
/// exception thrown by any task is rethrown after all threads join.
template <typename F>
auto parallel_map(std::size_t n, int workers, F && fn) -> std::vector<decltype(fn(std::size_t{}))>
{
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  const std::size_t threads =
    std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next = n;
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(work);
    }
    for (auto & th : pool) {
      th.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto & s : slots) {
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace scenmine

#endif  // SCENMINE__PIPELINE_HPP_
