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

#include "scenmine/map_index.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace scenmine
{

namespace
{
std::vector<Vec2> dedup_consecutive(const std::vector<Vec2> & pts)
{
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto & p : pts) {
    if (out.empty() || !(out.back() == p)) {
      out.push_back(p);
    }
  }
  return out;
}
}  // namespace

MapIndex::MapIndex(const Scenario & scenario) : scenario_(&scenario)
{
  for (const auto & lane : scenario.lanes) {
    auto pts = dedup_consecutive(lane.centerline);
    if (pts.size() < 2) {
      continue;
    }
    by_id_.emplace(lane.lane_id, lanes_.size());
    lanes_.push_back({&lane, Polyline(std::move(pts)), {}});
  }
  for (auto & l : lanes_) {
    for (const auto & id : l.lane->successors) {
      if (const auto it = by_id_.find(id); it != by_id_.end()) {
        l.successors.push_back(it->second);
      }
    }
  }

  // Points shared between lanes, matched on a millimetre grid.
  std::map<std::pair<long long, long long>, std::set<std::size_t>> owners;
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    for (const auto & p : lanes_[i].centerline.points()) {
      owners[{std::llround(p.x * 1000.0), std::llround(p.y * 1000.0)}].insert(i);
    }
  }
  for (const auto & [key, lanes] : owners) {
    if (lanes.size() >= 2) {
      conflict_points_.push_back(
        {static_cast<double>(key.first) / 1000.0, static_cast<double>(key.second) / 1000.0});
    }
  }
  for (std::size_t i = 0; i < scenario.map_features.size(); ++i) {
    const auto & f = scenario.map_features[i];
    if (f.geometry.empty()) {
      continue;
    }
    if (f.kind == MapFeatureKind::stop_sign) {
      conflict_points_.push_back(centroid(f.geometry));
    } else if (f.kind == MapFeatureKind::crosswalk) {
      crosswalks_.push_back(i);
    }
  }
}

std::optional<std::size_t> MapIndex::find(std::string_view lane_id) const
{
  const auto it = by_id_.find(std::string(lane_id));
  if (it == by_id_.end()) {
    return std::nullopt;
  }
  return it->second;
}

double MapIndex::distance_to_conflict(const Vec2 & p) const
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & c : conflict_points_) {
    best = std::min(best, distance(p, c));
  }
  for (const auto idx : crosswalks_) {
    best = std::min(best, point_polygon_distance(p, scenario_->map_features[idx].geometry));
  }
  return best;
}

}  // namespace scenmine
