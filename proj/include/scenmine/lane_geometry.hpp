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

#ifndef SCENMINE__LANE_GEOMETRY_HPP_
#define SCENMINE__LANE_GEOMETRY_HPP_

#include "scenmine/geometry.hpp"
#include "scenmine/scenario.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace scenmine
{

/// Curvilinear coordinates against a reference polyline. `s` is clamped to [0, length];
/// the longitudinal distance past either end, or past an interior vertex on its outer side,
/// is kept in `overshoot` (negative before, positive after). `d` is positive to the left of
/// the direction of travel.
struct FrenetState
{
  double s{0.0};
  double d{0.0};
  double overshoot{0.0};
  bool valid{false};

  /// Unclamped progress, continuous across the polyline ends.
  double extended_s() const { return s + overshoot; }
};

struct Projection
{
  double s{0.0};
  double d{0.0};
  std::size_t segment_index{0};
  double overshoot{0.0};
  double distance{0.0};  // Euclidean distance from the point to the polyline
};

class Polyline
{
public:
  /// Throws std::invalid_argument on fewer than 2 points or repeated consecutive points.
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  const std::vector<double> & cumulative_s() const { return cumulative_s_; }
  double length() const { return cumulative_s_.back(); }
  std::size_t segment_count() const { return points_.size() - 1; }
  const AxisBox & bounds() const { return bounds_; }

  Vec2 segment_direction(std::size_t i) const { return directions_[i]; }
  double segment_heading(std::size_t i) const { return headings_[i]; }
  double start_heading() const { return headings_.front(); }
  double end_heading() const { return headings_.back(); }

  /// Segment containing arc length `s`; the first/last segment outside [0, length].
  std::size_t segment_at(double s) const;

  /// Point at arc length `s`; beyond the ends the terminal tangents are extended.
  Vec2 point_at(double s) const;
  double heading_at(double s) const { return headings_[segment_at(s)]; }

private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_s_;
  std::vector<Vec2> directions_;
  std::vector<double> headings_;
  AxisBox bounds_;
};

/// Nearest point of the polyline to `p`; equal distances resolve to the lower segment index.
/// When the nearest point is an end or a vertex, `s` stops there and the residual along the
/// chosen segment's tangent goes to `overshoot`; `d` is the offset from that tangent line.
Projection project_to_polyline(const Vec2 & p, const Polyline & poly);

/// Per-step projection. Invalid input states map to invalid outputs; no monotonicity is
/// enforced on `s`.
std::vector<FrenetState> frenet_encode(std::span<const AgentState> track, const Polyline & ref);

/// Inverse of frenet_encode. A positive overshoot extends the segment ending at `s`, a
/// negative one the segment starting there. Velocity fields are left at zero.
std::vector<AgentState> frenet_decode(std::span<const FrenetState> traj, const Polyline & ref);

AgentState frenet_decode_one(const FrenetState & f, const Polyline & ref);

/// Joins centerlines end to start, merging junction points closer than `merge_eps`.
Polyline concatenate_centerlines(
  std::span<const std::vector<Vec2> * const> parts, double merge_eps = 1e-6);

}  // namespace scenmine

#endif  // SCENMINE__LANE_GEOMETRY_HPP_
