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

#ifndef TESTS__UNIT__SUPPORT_HPP_
#define TESTS__UNIT__SUPPORT_HPP_

#include "scenmine/scenario.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scenmine::test
{

inline Lane make_lane(
  std::string id, std::vector<Vec2> centerline, std::optional<double> limit = std::nullopt)
{
  Lane l;
  l.lane_id = std::move(id);
  l.centerline = std::move(centerline);
  l.speed_limit = limit;
  return l;
}

/// Constant velocity from `p0`, heading along the velocity (0 when stationary).
inline AgentTrack cv_track(
  std::string id, Vec2 p0, Vec2 vel, int steps, double dt = 0.1, bool predict = false)
{
  AgentTrack a;
  a.agent_id = std::move(id);
  a.to_predict = predict;
  const double h = (vel.x == 0.0 && vel.y == 0.0) ? 0.0 : std::atan2(vel.y, vel.x);
  for (int t = 0; t < steps; ++t) {
    a.states.push_back({p0.x + vel.x * t * dt, p0.y + vel.y * t * dt, h, vel.x, vel.y, true});
  }
  return a;
}

/// Track through explicit positions; heading follows the displacement.
inline AgentTrack path_track(std::string id, const std::vector<Vec2> & pts, double dt = 0.1)
{
  AgentTrack a;
  a.agent_id = std::move(id);
  double h = 0.0;
  for (std::size_t t = 0; t < pts.size(); ++t) {
    const Vec2 d = t + 1 < pts.size() ? pts[t + 1] - pts[t] : pts[t] - pts[t - 1];
    if (std::hypot(d.x, d.y) > 1e-9) {
      h = std::atan2(d.y, d.x);
    }
    a.states.push_back({pts[t].x, pts[t].y, h, d.x / dt, d.y / dt, true});
  }
  return a;
}

inline Scenario make_scenario(
  std::vector<AgentTrack> agents, std::vector<Lane> lanes = {}, int steps = 91)
{
  Scenario s;
  s.scenario_id = "fixture";
  s.T_tot = steps;
  s.t_obs_idx = 10;
  s.agents = std::move(agents);
  s.lanes = std::move(lanes);
  return s;
}

}  // namespace scenmine::test

#endif  // TESTS__UNIT__SUPPORT_HPP_
