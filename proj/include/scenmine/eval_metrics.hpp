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

#ifndef SCENMINE__EVAL_METRICS_HPP_
#define SCENMINE__EVAL_METRICS_HPP_

#include "scenmine/config.hpp"
#include "scenmine/scenario.hpp"
#include "scenmine/scoring.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace scenmine
{

/// K future modes for one agent; each mode has one point per future timestep.
struct AgentPrediction
{
  std::string scenario_id;
  std::string agent_id;
  std::vector<std::vector<Vec2>> modes;
  std::vector<double> confidences;
  std::vector<std::vector<double>> headings;  // optional, one per mode point
};

/// One JSON record per line. Throws DataError on malformed records, negative confidences,
/// confidences summing above 1, or a mode count that varies across the file. An optional
/// "headings" array gives one yaw per mode point.
std::vector<AgentPrediction> read_predictions_jsonl(std::istream & in);
void write_predictions_jsonl(std::ostream & out, const std::vector<AgentPrediction> & preds);

/// Single-mode predictions equal to each predict agent's ground-truth future, headings
/// included. Invalid future steps repeat the last known state.
std::vector<AgentPrediction> ground_truth_predictions(const Scenario & s);

struct AdeFde
{
  double min_ade{0.0};
  double min_fde{0.0};
};

/// Best-of-K displacement errors over the valid ground-truth steps; ADE and FDE minimized
/// independently. nullopt when the ground truth has no valid step.
std::optional<AdeFde> min_ade_fde(
  const AgentPrediction & pred, std::span<const AgentState> gt_future);

std::size_t top_confidence_mode(const AgentPrediction & pred);
std::size_t best_ade_mode(const AgentPrediction & pred, std::span<const AgentState> gt_future);

/// Full track with the mode substituted for the future. Without explicit headings, they
/// follow the displacement and keep the previous value for steps shorter than 0.1 m. A
/// future step is valid only where the ground truth is.
std::vector<AgentState> mode_track(
  const Scenario & s, std::size_t agent, const std::vector<Vec2> & mode,
  std::span<const double> headings = {});

/// Distinct other agents whose ground-truth future collides with the mode.
int mode_collisions(
  const Scenario & s, std::size_t agent, const std::vector<Vec2> & mode,
  std::span<const double> headings = {});

/// Mode with the fewest collisions; ties go to the higher confidence, then the lower index.
std::size_t min_collision_mode(const AgentPrediction & pred, const Scenario & s, std::size_t agent);

enum class TrajectoryBucket {
  stationary,
  straight,
  straight_left,
  straight_right,
  left,
  right,
  left_u_turn,
  right_u_turn,
};
inline constexpr std::size_t kNumBuckets = 8;
std::string_view to_string(TrajectoryBucket b);

/// Bucket of the ground-truth future from the last history state to the last valid
/// future state.
TrajectoryBucket classify_trajectory(const AgentState & start, const AgentState & end);

struct AgentMapRecord
{
  TrajectoryBucket bucket{TrajectoryBucket::straight};
  std::vector<std::pair<double, bool>> detections;  // (confidence, true positive)
};

std::optional<AgentMapRecord> map_record(
  const AgentPrediction & pred, const AgentState & last_history,
  std::span<const AgentState> gt_future);

/// 11-point interpolated AP. Equal confidences rank false positives first.
double average_precision(std::vector<std::pair<double, bool>> detections, std::size_t n_positive);

/// Mean AP over buckets that hold at least one ground-truth trajectory.
double map_metric(std::span<const AgentMapRecord> records);

struct ClassMetrics
{
  std::size_t n_agents{0};
  std::size_t n_skipped{0};
  double min_ade{0.0};
  double min_fde{0.0};
  double collision_rate{0.0};
  double map{0.0};
};

struct EvalReport
{
  std::array<ClassMetrics, 3> per_class{};  // vehicle, pedestrian, cyclist
  ClassMetrics overall;                      // mean over classes with agents
  std::size_t n_scenarios{0};

  std::string to_json() const;
  std::string to_table() const;
};

/// Evaluates every predict agent of the scenarios in `ids` (all when null). Throws
/// DataError listing predict agents that have no prediction.
EvalReport evaluate(
  const std::vector<Scenario> & scenarios, const std::vector<AgentPrediction> & preds,
  CollisionModeRule rule, const std::unordered_set<std::string> * ids = nullptr);

/// Counted collisions over predict agents, with ground truth used as the prediction.
struct CollisionTally
{
  std::size_t collisions{0};
  std::size_t agents{0};
  double rate() const { return agents == 0 ? 0.0 : static_cast<double>(collisions) / agents; }
};
CollisionTally ground_truth_collisions(const Scenario & s);

struct LossWeightRow
{
  std::string scenario_id;
  std::string agent_id;
  double weight{1.0};
  double score_fe{0.0};
};

/// weight = 1 + scale * score_ac per agent.
std::vector<LossWeightRow> loss_weights(
  const std::string & scenario_id, std::span<const TrajectoryScoreSet> scores, double scale);
void write_loss_weights_csv(std::ostream & out, const std::vector<LossWeightRow> & rows);

}  // namespace scenmine

#endif  // SCENMINE__EVAL_METRICS_HPP_
