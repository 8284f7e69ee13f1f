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

#include "scenmine/features_individual.hpp"

#include <algorithm>
#include <cmath>

namespace scenmine
{

std::array<double, 7> IndividualFeatures::values() const
{
  return {max_speed, max_accel, max_jerk, waiting_period,
          speed_limit_excess, lane_following_fraction, anomaly};
}

IndividualFeatures IndividualFeatures::from_values(const std::array<double, 7> & v)
{
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

namespace
{
std::vector<std::optional<double>> difference(
  const std::vector<std::optional<double>> & series, double dt)
{
  std::vector<std::optional<double>> out(series.size());
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (series[t] && series[t - 1]) {
      out[t] = (*series[t] - *series[t - 1]) / dt;
    }
  }
  return out;
}

double max_abs(const std::vector<std::optional<double>> & series)
{
  double best = 0.0;
  for (const auto & v : series) {
    if (v) {
      best = std::max(best, std::abs(*v));
    }
  }
  return best;
}
}  // namespace

KinematicProfile kinematic_profile(std::span<const AgentState> track, double dt)
{
  KinematicProfile kin;
  kin.speed.assign(track.size(), std::nullopt);
  for (std::size_t t = 1; t < track.size(); ++t) {
    if (track[t].valid && track[t - 1].valid) {
      kin.speed[t] = distance(track[t].position(), track[t - 1].position()) / dt;
    }
  }
  kin.accel = difference(kin.speed, dt);
  kin.jerk = difference(kin.accel, dt);
  return kin;
}

double waiting_period(
  std::span<const AgentState> track, const KinematicProfile & kin, const MapIndex & map,
  double dt, const IndividualParams & params)
{
  std::size_t run = 0;
  std::size_t longest = 0;
  for (std::size_t t = 0; t < track.size(); ++t) {
    const bool waiting = kin.speed[t] && *kin.speed[t] < params.wait_speed &&
                         map.distance_to_conflict(track[t].position()) <= params.wait_radius;
    run = waiting ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  return static_cast<double>(longest) * dt;
}

SpeedLimitExcess speed_limit_excess(
  const KinematicProfile & kin, const LaneSequence & seq, const MapIndex & map)
{
  SpeedLimitExcess out;
  if (!seq.assigned) {
    out.unassigned = true;
    return out;
  }
  for (std::size_t t = 0; t < kin.speed.size() && t < seq.per_step_lane.size(); ++t) {
    if (!kin.speed[t] || !seq.per_step_lane[t]) {
      continue;
    }
    const auto & limit = map.lane(*seq.per_step_lane[t]).lane->speed_limit;
    if (limit) {
      out.value = std::max(out.value, *kin.speed[t] - *limit);
    }
  }
  return out;
}

std::vector<LaneRelativeState> lane_relative_states(
  std::span<const AgentState> track, const LaneSequence & seq, const MapIndex & map)
{
  std::vector<LaneRelativeState> out(track.size());
  if (!seq.assigned) {
    return out;
  }
  for (std::size_t t = 0; t < track.size() && t < seq.per_step_lane.size(); ++t) {
    if (!track[t].valid || !seq.per_step_lane[t]) {
      continue;
    }
    const Polyline & line = map.lane(*seq.per_step_lane[t]).centerline;
    const Projection pr = project_to_polyline(track[t].position(), line);
    out[t].d = pr.distance;
    out[t].heading_error =
      normalize_angle(track[t].heading - line.segment_heading(pr.segment_index));
    out[t].valid = true;
  }
  return out;
}

double lane_following_fraction(
  std::span<const LaneRelativeState> traj, const IndividualParams & params)
{
  std::size_t valid = 0;
  std::size_t following = 0;
  for (const auto & st : traj) {
    if (!st.valid) {
      continue;
    }
    ++valid;
    if (std::abs(st.d) <= params.follow_max_d &&
        std::abs(st.heading_error) <= params.follow_max_heading) {
      ++following;
    }
  }
  return valid == 0 ? 0.0 : static_cast<double>(following) / static_cast<double>(valid);
}

IndividualFeatures extract_individual_features(
  std::span<const AgentState> track, const LaneSequence & seq, const MapIndex & map, double dt,
  const IndividualParams & params)
{
  IndividualFeatures f;
  const auto kin = kinematic_profile(track, dt);
  f.max_speed = max_abs(kin.speed);
  f.max_accel = max_abs(kin.accel);
  f.max_jerk = max_abs(kin.jerk);
  f.waiting_period = waiting_period(track, kin, map, dt, params);
  f.speed_limit_excess = speed_limit_excess(kin, seq, map).value;
  // An unassigned agent has no lane-relative steps, so the fraction comes out as 0.
  const auto rel = lane_relative_states(track, seq, map);
  f.lane_following_fraction = lane_following_fraction(rel, params);
  return f;
}

}  // namespace scenmine
