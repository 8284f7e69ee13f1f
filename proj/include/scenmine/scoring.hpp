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

#ifndef SCENMINE__SCORING_HPP_
#define SCENMINE__SCORING_HPP_

#include "scenmine/features_individual.hpp"
#include "scenmine/features_interaction.hpp"
#include "scenmine/lane_assignment.hpp"
#include "scenmine/map_index.hpp"
#include "scenmine/scenario.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

namespace scenmine
{

inline constexpr std::size_t kNumIndividual = 7;
inline constexpr std::size_t kNumInteraction = 6;

using IndividualVector = std::array<double, kNumIndividual>;
using InteractionVector = std::array<double, kNumInteraction>;

struct ScoreWeights
{
  IndividualVector individual{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  InteractionVector interaction{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

enum class Orientation { identity, inverse, negate };

std::string_view to_string(Orientation o);

/// Criticality orientation followed by an affine map of [lo, hi] onto [0, 1] with clamping.
struct FeatureScale
{
  std::string name;
  Orientation orientation{Orientation::identity};
  double lo{0.0};
  double hi{1.0};
  bool constant{false};  // maps to 0.5 everywhere

  double orient(double raw, double epsilon) const;
  double apply(double raw, double epsilon) const;
};

class FeatureNormalizer
{
public:
  FeatureNormalizer();

  /// Fits the quantile anchors on raw feature rows. When the low and high quantiles
  /// coincide, the next larger observed value becomes the upper anchor; a feature with a
  /// single observed value is flagged constant. The anchors are kept at least `min_span`
  /// apart so spreads at rounding level stay near 0. Throws std::invalid_argument on an
  /// empty corpus.
  static FeatureNormalizer fit(
    std::span<const IndividualVector> individual, std::span<const InteractionVector> interaction,
    double epsilon = 0.1, double q_low = 0.05, double q_high = 0.95, double min_span = 1e-3);

  IndividualVector normalize(const IndividualVector & raw) const;
  InteractionVector normalize(const InteractionVector & raw) const;

  const std::array<FeatureScale, kNumIndividual> & individual_scales() const { return ind_; }
  const std::array<FeatureScale, kNumInteraction> & interaction_scales() const { return int_; }
  std::array<FeatureScale, kNumIndividual> & individual_scales() { return ind_; }
  std::array<FeatureScale, kNumInteraction> & interaction_scales() { return int_; }
  double epsilon() const { return epsilon_; }
  const std::vector<std::string> & warnings() const { return warnings_; }

  std::string to_json() const;
  static FeatureNormalizer from_json(const std::string & text);

private:
  std::array<FeatureScale, kNumIndividual> ind_;
  std::array<FeatureScale, kNumInteraction> int_;
  double epsilon_{0.1};
  std::vector<std::string> warnings_;
};

/// Linear-interpolated quantile of a sorted sample.
double sorted_quantile(std::span<const double> sorted, double q);

double individual_score(const IndividualVector & normalized, const ScoreWeights & w);
double interaction_score(const InteractionVector & normalized, const ScoreWeights & w);

/// Individual score plus the interaction score of every pair the agent belongs to.
double trajectory_score(
  const IndividualVector & individual, std::span<const InteractionVector> pairs,
  const FeatureNormalizer & norm, const ScoreWeights & w);

struct ExtrapolationParams
{
  int window{5};            // history intervals averaged for the velocity estimate
  double chain_gap{1.0};    // m, largest end-to-start gap joining lanes into the reference
};

/// Lanes of `seq` chained backwards from its last lane while consecutive lanes connect.
std::vector<std::size_t> reference_chain(
  const LaneSequence & seq, const MapIndex & map, double chain_gap = 1.0);

/// Counterfactual track: history copied, then constant progress along the assigned lanes
/// with the lateral offset held (Cartesian constant velocity when unassigned) for every
/// step after t_obs_idx. `hist_seq` must come from the history steps only.
std::vector<AgentState> future_extrapolate(
  const AgentTrack & track, const LaneSequence & hist_seq, const MapIndex & map, double dt,
  int t_obs_idx, int T_tot, const ExtrapolationParams & params = {});

struct TrajectoryScoreSet
{
  std::string agent_id;
  double score_gt{0.0};
  double score_fe{0.0};
  double score_as{0.0};
  double score_ac{0.0};
  double combined() const { return std::max(score_gt, score_fe); }
};

enum class ScoreVariant { gt, fe, combined, asymmetric, asymmetric_combined };
inline constexpr std::array<ScoreVariant, 5> kScoreVariants{
  ScoreVariant::gt, ScoreVariant::fe, ScoreVariant::combined, ScoreVariant::asymmetric,
  ScoreVariant::asymmetric_combined};
std::string_view to_string(ScoreVariant v);
double variant_value(const TrajectoryScoreSet & s, ScoreVariant v);

struct SceneScore
{
  std::string scenario_id;
  double value{0.0};  // asymmetric combined
  std::array<double, 5> variants{};  // indexed like kScoreVariants
  std::size_t n_agents{0};
  std::size_t n_predict{0};
};

/// 1 / (1 + d) where d is the agent's distance to the nearest predict agent; 0 when it
/// never shares a valid step with one.
double proximity_weight(double min_distance_to_predict);

/// Weighted sum of per-agent scores over P + sqrt(N - P).
double scene_value(
  std::span<const double> agent_scores, std::span<const double> weights, std::size_t n_predict);

/// Smallest co-valid centre distance from each agent to any predict agent (0 for predict
/// agents, +inf when never co-valid).
std::vector<double> min_distance_to_predict(const Scenario & s);

}  // namespace scenmine

#endif  // SCENMINE__SCORING_HPP_
