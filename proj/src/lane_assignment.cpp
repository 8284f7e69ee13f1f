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

#include "scenmine/lane_assignment.hpp"

#include <algorithm>
#include <cmath>

namespace scenmine
{

namespace
{
const std::string & lane_id(const MapIndex & map, std::size_t i)
{
  return map.lane(i).lane->lane_id;
}

bool candidate_before(const MapIndex & map, const LaneCandidate & a, const LaneCandidate & b)
{
  if (a.log_likelihood != b.log_likelihood) {
    return a.log_likelihood > b.log_likelihood;
  }
  return lane_id(map, a.lane) < lane_id(map, b.lane);
}
}  // namespace

std::vector<LaneCandidate> candidate_lanes(
  const AgentState & state, const MapIndex & map, const AssignmentParams & params)
{
  std::vector<LaneCandidate> out;
  if (!state.valid) {
    return out;
  }
  const Vec2 p = state.position();
  const double inv_var_d = 1.0 / (2.0 * params.sigma_d * params.sigma_d);
  const double inv_var_t = 1.0 / (2.0 * params.sigma_theta * params.sigma_theta);
  for (std::size_t i = 0; i < map.lanes().size(); ++i) {
    const Polyline & line = map.lane(i).centerline;
    if (!line.bounds().inflated(params.max_lateral).contains(p)) {
      continue;
    }
    const Projection pr = project_to_polyline(p, line);
    if (pr.distance > params.max_lateral) {
      continue;
    }
    const double dtheta = normalize_angle(state.heading - line.segment_heading(pr.segment_index));
    out.push_back({i, -pr.distance * pr.distance * inv_var_d - dtheta * dtheta * inv_var_t});
  }
  std::sort(out.begin(), out.end(), [&map](const LaneCandidate & a, const LaneCandidate & b) {
    return candidate_before(map, a, b);
  });
  return out;
}

std::optional<std::size_t> LaneSequence::last_lane() const
{
  for (auto it = per_step_lane.rbegin(); it != per_step_lane.rend(); ++it) {
    if (*it) {
      return *it;
    }
  }
  return std::nullopt;
}

bool transition_allowed(
  const MapIndex & map, std::size_t a, std::size_t b, const AssignmentParams & params)
{
  if (a == b) {
    return true;
  }
  const auto & from = map.lane(a);
  if (std::find(from.successors.begin(), from.successors.end(), b) != from.successors.end()) {
    return true;
  }
  const double deflection =
    normalize_angle(map.lane(b).centerline.start_heading() - from.centerline.end_heading());
  return std::abs(deflection) <= params.max_deflection;
}

LaneSequence assign_lane_sequence(
  std::span<const AgentState> states, const MapIndex & map, const AssignmentParams & params)
{
  struct Hypothesis
  {
    double score;
    std::size_t lane;
    int back;  // index into the previous active step's hypotheses
  };
  struct ActiveStep
  {
    std::size_t t;
    std::vector<Hypothesis> hyps;
  };

  const auto beam_width = static_cast<std::size_t>(std::max(params.beam_width, 1));
  std::vector<ActiveStep> active;
  auto order = [&map](const Hypothesis & a, const Hypothesis & b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return lane_id(map, a.lane) < lane_id(map, b.lane);
  };

  for (std::size_t t = 0; t < states.size(); ++t) {
    if (!states[t].valid) {
      continue;
    }
    const auto candidates = candidate_lanes(states[t], map, params);
    if (candidates.empty()) {
      continue;
    }
    std::vector<Hypothesis> next;
    if (active.empty()) {
      for (const auto & c : candidates) {
        next.push_back({c.log_likelihood, c.lane, -1});
      }
    } else {
      const auto & prev = active.back().hyps;
      for (const auto & c : candidates) {
        int best = -1;
        for (std::size_t k = 0; k < prev.size(); ++k) {
          if (!transition_allowed(map, prev[k].lane, c.lane, params)) {
            continue;
          }
          if (best < 0 || prev[k].score > prev[static_cast<std::size_t>(best)].score) {
            best = static_cast<int>(k);
          }
        }
        if (best >= 0) {
          next.push_back(
            {prev[static_cast<std::size_t>(best)].score + c.log_likelihood, c.lane, best});
        }
      }
    }
    if (next.empty()) {
      continue;
    }
    std::sort(next.begin(), next.end(), order);
    if (next.size() > beam_width) {
      next.resize(beam_width);
    }
    active.push_back({t, std::move(next)});
  }

  LaneSequence seq;
  seq.per_step_lane.assign(states.size(), std::nullopt);
  if (active.empty()) {
    return seq;
  }
  seq.assigned = true;
  seq.log_score = active.back().hyps.front().score;
  int idx = 0;
  for (std::size_t k = active.size(); k-- > 0;) {
    const auto & h = active[k].hyps[static_cast<std::size_t>(idx)];
    seq.per_step_lane[active[k].t] = h.lane;
    idx = h.back;
  }

  // Valid steps that were skipped inherit the nearest earlier lane, else the next one.
  std::optional<std::size_t> carry;
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (seq.per_step_lane[t]) {
      carry = seq.per_step_lane[t];
    } else if (states[t].valid && carry) {
      seq.per_step_lane[t] = carry;
    }
  }
  carry.reset();
  for (std::size_t t = states.size(); t-- > 0;) {
    if (seq.per_step_lane[t]) {
      carry = seq.per_step_lane[t];
    } else if (states[t].valid && carry) {
      seq.per_step_lane[t] = carry;
    }
  }

  for (const auto & lane : seq.per_step_lane) {
    if (lane && (seq.lane_ids.empty() || seq.lane_ids.back() != lane_id(map, *lane))) {
      seq.lane_ids.push_back(lane_id(map, *lane));
    }
  }
  return seq;
}

}  // namespace scenmine
