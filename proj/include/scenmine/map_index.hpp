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

#ifndef SCENMINE__MAP_INDEX_HPP_
#define SCENMINE__MAP_INDEX_HPP_

#include "scenmine/lane_geometry.hpp"
#include "scenmine/scenario.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scenmine
{

struct IndexedLane
{
  const Lane * lane{nullptr};
  Polyline centerline;
  std::vector<std::size_t> successors;
};

/// Read-only lookup structures derived once per scenario. Holds pointers into the
/// scenario, which must outlive the index.
class MapIndex
{
public:
  explicit MapIndex(const Scenario & scenario);

  const std::vector<IndexedLane> & lanes() const { return lanes_; }
  std::optional<std::size_t> find(std::string_view lane_id) const;
  const IndexedLane & lane(std::size_t i) const { return lanes_[i]; }

  /// Stop-sign points and centerline points shared by two or more lanes.
  const std::vector<Vec2> & conflict_points() const { return conflict_points_; }
  /// Indices into scenario.map_features of crosswalk polygons.
  const std::vector<std::size_t> & crosswalks() const { return crosswalks_; }

  /// Distance from `p` to the nearest conflict region, +inf when there is none.
  double distance_to_conflict(const Vec2 & p) const;

  const Scenario & scenario() const { return *scenario_; }

private:
  const Scenario * scenario_;
  std::vector<IndexedLane> lanes_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<Vec2> conflict_points_;
  std::vector<std::size_t> crosswalks_;
};

}  // namespace scenmine

#endif  // SCENMINE__MAP_INDEX_HPP_
