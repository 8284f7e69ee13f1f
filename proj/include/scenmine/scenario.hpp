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

#ifndef SCENMINE__SCENARIO_HPP_
#define SCENMINE__SCENARIO_HPP_

#include "scenmine/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scenmine
{

inline constexpr int kSchemaVersion = 1;

/// Raised by the scenario reader; the message starts with the offending field path.
class ParseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class AgentType { vehicle, pedestrian, cyclist };
enum class LaneType { surface_street, freeway, bike_lane };
enum class MapFeatureKind { crosswalk, stop_sign, speed_bump };

std::string_view to_string(AgentType t);
std::string_view to_string(LaneType t);
std::string_view to_string(MapFeatureKind k);

/// One timestep of one agent. When `valid` is false the remaining fields carry no meaning.
struct AgentState
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double vx{0.0};
  double vy{0.0};
  bool valid{false};

  Vec2 position() const { return {x, y}; }
};

struct AgentTrack
{
  std::string agent_id;
  AgentType agent_type{AgentType::vehicle};
  double length{4.5};
  double width{2.0};
  std::vector<AgentState> states;
  bool to_predict{false};

  std::size_t valid_count() const;
};

struct Lane
{
  std::string lane_id;
  std::vector<Vec2> centerline;
  std::optional<double> speed_limit;
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;
  LaneType lane_type{LaneType::surface_street};
};

/// A crosswalk or speed bump polygon, or a stop-sign point (single vertex).
struct MapFeature
{
  std::string feature_id;
  MapFeatureKind kind{MapFeatureKind::crosswalk};
  std::vector<Vec2> geometry;
};

struct Scenario
{
  std::string scenario_id;
  double dt{0.1};
  int t_obs_idx{10};
  int T_tot{91};
  std::vector<AgentTrack> agents;
  std::vector<Lane> lanes;  // sorted by lane_id
  std::vector<MapFeature> map_features;

  std::size_t n_predict() const;
  const Lane * find_lane(std::string_view lane_id) const;
};

struct ParsedScenario
{
  Scenario scenario;
  std::vector<std::string> warnings;
};

/// Reads one canonical scenario document. Dangling lane references are dropped with a
/// warning, and any validation violation of the parsed result is reported as a warning.
ParsedScenario parse_scenario(std::string_view text);

/// Canonical document: fixed key order, shortest round-trip number formatting.
std::string serialize_scenario(const Scenario & s);

/// Reads a `.json` file (one document) or a `.jsonl` file (one document per line).
std::vector<ParsedScenario> load_scenario_file(const std::string & path);

/// All scenario documents under `dir`, sorted by file name then line.
std::vector<ParsedScenario> load_scenario_dir(const std::string & dir);

struct Violation
{
  std::string code;
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_scenario(const Scenario & s);

/// Half-open timestep index range.
struct IndexRange
{
  std::size_t begin{0};
  std::size_t end{0};

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

struct TimeSplit
{
  IndexRange history;
  IndexRange future;
};

/// History is [0, t_obs_idx], future is (t_obs_idx, T_tot).
TimeSplit split_history_future(const Scenario & s);

inline std::span<const AgentState> view(const AgentTrack & track, IndexRange range)
{
  return std::span<const AgentState>(track.states).subspan(range.begin, range.size());
}

}  // namespace scenmine

#endif  // SCENMINE__SCENARIO_HPP_
