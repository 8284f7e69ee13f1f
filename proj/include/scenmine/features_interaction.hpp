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

#ifndef SCENMINE__FEATURES_INTERACTION_HPP_
#define SCENMINE__FEATURES_INTERACTION_HPP_

#include "scenmine/geometry.hpp"
#include "scenmine/scenario.hpp"

#include <array>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace scenmine
{

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct InteractionParams
{
  double gate_distance{50.0};                          // m
  double cone_half_angle{15.0 * std::numbers::pi / 180.0};
  double max_heading_difference{120.0 * std::numbers::pi / 180.0};  // beyond this: oncoming
  double min_follower_speed{0.1};                      // m/s, THW undefined below
  double min_gap{0.01};                                // m
  double crossing_tolerance{0.5};                      // m, merges nearby crossings
  double crossing_min_sin{0.0349};                     // below ~2 degrees paths count as parallel
  double reach_radius{2.0};                            // m
};

/// Pairwise aggregates. Missing relations are +inf for minima and 0 for maxima/counts.
struct InteractionFeatures
{
  double min_thw{kInf};
  double min_ttc{kInf};
  double max_drac{0.0};
  double min_delta_mttcp_traj{kInf};
  double min_delta_mttcp_map{kInf};
  double collision_count{0.0};

  static constexpr std::array<std::string_view, 6> kNames{
    "min_thw", "min_ttc", "max_drac", "min_delta_mttcp_traj", "min_delta_mttcp_map",
    "collision_count"};

  std::array<double, 6> values() const;
  static InteractionFeatures from_values(const std::array<double, 6> & v);
};

/// A track plus footprint. `speed`, when non-empty, holds per-step speeds aligned with
/// `states` (see kinematic_profile); otherwise they are derived on the fly.
struct TrackView
{
  std::span<const AgentState> states;
  double length{4.5};
  double width{2.0};
  std::span<const std::optional<double>> speed{};
};

inline TrackView make_view(const AgentTrack & track)
{
  return {track.states, track.length, track.width, {}};
}

struct AgentPair
{
  std::size_t i{0};  // index into scenario.agents, the lower agent_id
  std::size_t j{0};
};

/// Unordered pairs whose closest co-valid centre distance is within the gate, sorted by ids.
std::vector<AgentPair> find_interaction_pairs(const Scenario & s, double gate_distance = 50.0);

struct LeaderFollowerStep
{
  bool relation{false};
  double gap{0.0};
  double v_follower{0.0};
  double v_leader{0.0};
  std::optional<double> thw;
  std::optional<double> ttc;
  double drac{0.0};
};

struct LeaderFollowerResult
{
  std::vector<LeaderFollowerStep> a_follows_b;
  std::vector<LeaderFollowerStep> b_follows_a;
  double min_thw{kInf};
  double min_ttc{kInf};
  double max_drac{0.0};
};

LeaderFollowerResult leader_follower_metrics(
  const TrackView & a, const TrackView & b, double dt, const InteractionParams & params = {});

enum class ConflictKind { trajectory_crossing, map_feature };

struct ConflictPoint
{
  Vec2 position;
  ConflictKind kind{ConflictKind::trajectory_crossing};
  std::optional<double> t_reach_i;  // seconds from the first timestep
  std::optional<double> t_reach_j;
};

std::vector<ConflictPoint> conflict_points(
  const TrackView & path_i, const TrackView & path_j, std::span<const MapFeature> map_features,
  double dt, const InteractionParams & params = {});

struct DeltaMttcp
{
  double trajectory{kInf};
  double map{kInf};
};

DeltaMttcp delta_mttcp(std::span<const ConflictPoint> points);

struct CollisionResult
{
  int collision_count{0};
  std::vector<std::size_t> colliding_steps;
};

/// Footprint overlap or crossing centre sweeps between t-1 and t, restricted to timesteps
/// in `range` (whole track when nullopt). Each contiguous colliding run is one event.
CollisionResult detect_collisions(
  const TrackView & a, const TrackView & b, std::optional<IndexRange> range = std::nullopt);

bool collide_at(const TrackView & a, const TrackView & b, std::size_t t);

InteractionFeatures extract_interaction_features(
  const TrackView & a, const TrackView & b, std::span<const MapFeature> map_features, double dt,
  const InteractionParams & params = {});

}  // namespace scenmine

#endif  // SCENMINE__FEATURES_INTERACTION_HPP_
