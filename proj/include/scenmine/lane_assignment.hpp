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

#ifndef SCENMINE__LANE_ASSIGNMENT_HPP_
#define SCENMINE__LANE_ASSIGNMENT_HPP_

#include "scenmine/map_index.hpp"
#include "scenmine/scenario.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scenmine
{

struct AssignmentParams
{
  double sigma_d{1.0};          // m
  double sigma_theta{0.35};     // rad
  double max_deflection{0.6};   // rad, end-to-start tangent angle allowed between lanes
  int beam_width{8};
  double max_lateral{5.0};      // m
};

struct LaneCandidate
{
  std::size_t lane{0};  // index into MapIndex::lanes()
  double log_likelihood{0.0};
};

/// Gaussian likelihood over lateral distance and heading residual, best first; equal
/// scores are ordered by lane_id. Lanes farther than max_lateral are skipped.
std::vector<LaneCandidate> candidate_lanes(
  const AgentState & state, const MapIndex & map, const AssignmentParams & params);

struct LaneSequence
{
  std::vector<std::string> lane_ids;  // consecutive distinct lanes
  double log_score{0.0};
  /// Lane index per timestep of the input span; nullopt on invalid steps.
  std::vector<std::optional<std::size_t>> per_step_lane;
  bool assigned{false};

  std::optional<std::size_t> last_lane() const;
};

/// True when b may follow a: the same lane, a connectivity successor, or a tangent
/// deflection from a's end to b's start within max_deflection.
bool transition_allowed(
  const MapIndex & map, std::size_t a, std::size_t b, const AssignmentParams & params);

/// Beam search over per-step candidates, keeping the best hypothesis per ending lane.
/// Steps without candidates (or with no reachable candidate) take the lane of the
/// nearest assigned step. Unassigned only when no step has a candidate.
LaneSequence assign_lane_sequence(
  std::span<const AgentState> states, const MapIndex & map, const AssignmentParams & params);

}  // namespace scenmine

#endif  // SCENMINE__LANE_ASSIGNMENT_HPP_
