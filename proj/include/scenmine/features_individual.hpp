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

#ifndef SCENMINE__FEATURES_INDIVIDUAL_HPP_
#define SCENMINE__FEATURES_INDIVIDUAL_HPP_

#include "scenmine/lane_assignment.hpp"
#include "scenmine/map_index.hpp"
#include "scenmine/scenario.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace scenmine
{

struct IndividualParams
{
  double wait_speed{0.5};    // m/s
  double wait_radius{5.0};   // m from a conflict region
  double follow_max_d{2.0};  // m
  double follow_max_heading{std::numbers::pi / 4.0};
};

/// Trajectory-level aggregates; kinematic entries are maxima over valid timesteps.
struct IndividualFeatures
{
  double max_speed{0.0};
  double max_accel{0.0};
  double max_jerk{0.0};
  double waiting_period{0.0};
  double speed_limit_excess{0.0};
  double lane_following_fraction{0.0};
  double anomaly{0.0};

  static constexpr std::array<std::string_view, 7> kNames{
    "max_speed", "max_accel", "max_jerk", "waiting_period",
    "speed_limit_excess", "lane_following_fraction", "anomaly"};

  std::array<double, 7> values() const;
  static IndividualFeatures from_values(const std::array<double, 7> & v);
};

/// Per-timestep kinematics from backward position differences. Entry t of `speed`
/// covers the interval (t-1, t); accel and jerk difference consecutive entries.
struct KinematicProfile
{
  std::vector<std::optional<double>> speed;
  std::vector<std::optional<double>> accel;
  std::vector<std::optional<double>> jerk;
};

KinematicProfile kinematic_profile(std::span<const AgentState> track, double dt);

/// Longest run of slow speed entries within wait_radius of a conflict region, in seconds.
double waiting_period(
  std::span<const AgentState> track, const KinematicProfile & kin, const MapIndex & map,
  double dt, const IndividualParams & params = {});

struct SpeedLimitExcess
{
  double value{0.0};
  bool unassigned{false};
};

/// Largest one-sided excess of speed over the posted limit of the step's lane.
SpeedLimitExcess speed_limit_excess(
  const KinematicProfile & kin, const LaneSequence & seq, const MapIndex & map);

/// Lateral offset and heading error of one step against its assigned lane.
struct LaneRelativeState
{
  double d{0.0};
  double heading_error{0.0};
  bool valid{false};
};

std::vector<LaneRelativeState> lane_relative_states(
  std::span<const AgentState> track, const LaneSequence & seq, const MapIndex & map);

/// Share of valid steps within follow_max_d and follow_max_heading of the lane.
/// Zero for an empty or all-invalid input, which is what an unassigned agent yields.
double lane_following_fraction(
  std::span<const LaneRelativeState> traj, const IndividualParams & params = {});

/// All individual features except `anomaly`, which the primitive model fills in.
IndividualFeatures extract_individual_features(
  std::span<const AgentState> track, const LaneSequence & seq, const MapIndex & map, double dt,
  const IndividualParams & params = {});

}  // namespace scenmine

#endif  // SCENMINE__FEATURES_INDIVIDUAL_HPP_
