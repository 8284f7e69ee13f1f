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

#ifndef SCENMINE__SYNTH_HPP_
#define SCENMINE__SYNTH_HPP_

#include "scenmine/scenario.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace scenmine
{

enum class SynthKind { leader_follower, crossing, cut_in, random_mix, stop_and_go };

std::string_view to_string(SynthKind k);
/// Throws std::invalid_argument on an unknown name.
SynthKind synth_kind_from_string(std::string_view name);

/// Follower behind a leader on one straight lane, both at constant speed. `gap` is the
/// bumper-to-bumper distance at the last timestep.
struct LeaderFollowerParams
{
  double v_follower{15.0};
  double v_leader{10.0};
  double gap{20.0};
};

/// Two agents on perpendicular lanes through the origin. Agent i passes the origin at
/// `t_cross` seconds, agent j `arrival_offset` seconds later.
struct CrossingParams
{
  double v_i{10.0};
  double v_j{10.0};
  double t_cross{4.0};
  double arrival_offset{0.5};
};

/// Three lanes at y = -3.5, 0 and 3.5. The aggressive vehicle merges from the left lane in
/// front of the defensive one, which slows down smoothly to the merging speed.
struct CutInParams
{
  double v_defensive{15.0};
  double v_aggressive{11.0};
  double initial_gap{17.0};      // m, bumper gap at t = 0
  double merge_start{1.5};       // s
  double merge_duration{2.5};    // s
};

struct SynthParams
{
  SynthKind kind{SynthKind::random_mix};
  std::uint64_t seed{0};
  std::string scenario_id;  // generated from kind and seed when empty
  double dt{0.1};
  int t_obs_idx{10};
  int T_tot{91};
  LeaderFollowerParams leader_follower;
  CrossingParams crossing;
  CutInParams cut_in;
  int max_agents{16};
};

/// Canonical document for the parameters. Identical parameters give identical bytes.
std::string gen_document(const SynthParams & params);

/// gen_document read back through the scenario parser.
Scenario gen_scenario(const SynthParams & params);

/// `count` scenarios of one kind. Scenario k uses a seed derived from (seed, k); the
/// closed-form kinds draw their kinematic parameters from that seed as well.
std::vector<Scenario> gen_corpus(SynthKind kind, std::size_t count, std::uint64_t seed);

/// Parameters gen_corpus uses for scenario k.
SynthParams corpus_params(SynthKind kind, std::size_t k, std::uint64_t seed);

}  // namespace scenmine

#endif  // SCENMINE__SYNTH_HPP_
