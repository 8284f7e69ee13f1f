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

#include "scenmine/lane_geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace scenmine
{

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least 2 points");
  }
  cumulative_s_.reserve(points_.size());
  directions_.reserve(points_.size() - 1);
  headings_.reserve(points_.size() - 1);
  cumulative_s_.push_back(0.0);
  bounds_.extend(points_[0]);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const Vec2 seg = points_[i] - points_[i - 1];
    const double len = norm(seg);
    if (!(len > 0.0)) {
      throw std::invalid_argument("polyline has repeated consecutive points");
    }
    cumulative_s_.push_back(cumulative_s_.back() + len);
    directions_.push_back(seg / len);
    headings_.push_back(std::atan2(seg.y, seg.x));
    bounds_.extend(points_[i]);
  }
}

std::size_t Polyline::segment_at(double s) const
{
  if (s <= 0.0) {
    return 0;
  }
  const auto it = std::upper_bound(cumulative_s_.begin(), cumulative_s_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_s_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, segment_count() - 1);
}

Vec2 Polyline::point_at(double s) const
{
  const std::size_t i = segment_at(s);
  return points_[i] + directions_[i] * (s - cumulative_s_[i]);
}

Projection project_to_polyline(const Vec2 & p, const Polyline & poly)
{
  const auto & pts = poly.points();
  const std::size_t n_seg = poly.segment_count();
  std::size_t best = 0;
  double best_dist2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_seg; ++i) {
    const Vec2 & a = pts[i];
    const Vec2 u = poly.segment_direction(i);
    const double seg_len = poly.cumulative_s()[i + 1] - poly.cumulative_s()[i];
    const double along = std::clamp(dot(p - a, u), 0.0, seg_len);
    const Vec2 q = a + u * along;
    const Vec2 r = p - q;
    const double d2 = dot(r, r);
    if (d2 < best_dist2) {
      best_dist2 = d2;
      best = i;
    }
  }

  if (best + 1 < n_seg && dot(p - pts[best + 1], poly.segment_direction(best)) == 0.0) {
    ++best;  // decode reads an interior vertex with zero overshoot against the next segment
  }

  Projection out;
  out.segment_index = best;
  out.distance = std::sqrt(best_dist2);
  const Vec2 u = poly.segment_direction(best);
  const double seg_start = poly.cumulative_s()[best];
  const double seg_len = poly.cumulative_s()[best + 1] - seg_start;
  const Vec2 r = p - pts[best];
  const double along = dot(r, u);

  // Off the ends, and in the outer wedge of an interior vertex, the point is expressed
  // against the tangent extension of the nearest segment.
  const double clamped = std::clamp(along, 0.0, seg_len);
  out.s = seg_start + clamped;
  out.overshoot = along - clamped;
  out.d = cross(u, r);
  return out;
}

std::vector<FrenetState> frenet_encode(std::span<const AgentState> track, const Polyline & ref)
{
  std::vector<FrenetState> out(track.size());
  for (std::size_t t = 0; t < track.size(); ++t) {
    if (!track[t].valid) {
      continue;
    }
    const Projection pr = project_to_polyline(track[t].position(), ref);
    out[t] = {pr.s, pr.d, pr.overshoot, true};
  }
  return out;
}

AgentState frenet_decode_one(const FrenetState & f, const Polyline & ref)
{
  AgentState st;
  if (!f.valid) {
    return st;
  }
  std::size_t seg = ref.segment_at(f.s);
  if (f.overshoot > 0.0 && seg > 0 && f.s <= ref.cumulative_s()[seg]) {
    --seg;  // extend the segment that ends at s
  }
  const Vec2 u = ref.segment_direction(seg);
  const Vec2 p = ref.points()[seg] + u * (f.extended_s() - ref.cumulative_s()[seg]) +
                 left_normal(u) * f.d;
  st.x = p.x;
  st.y = p.y;
  st.heading = ref.segment_heading(seg);
  st.valid = true;
  return st;
}

std::vector<AgentState> frenet_decode(std::span<const FrenetState> traj, const Polyline & ref)
{
  std::vector<AgentState> out;
  out.reserve(traj.size());
  for (const auto & f : traj) {
    out.push_back(frenet_decode_one(f, ref));
  }
  return out;
}

Polyline concatenate_centerlines(
  std::span<const std::vector<Vec2> * const> parts, double merge_eps)
{
  std::vector<Vec2> joined;
  for (const auto * part : parts) {
    for (const auto & p : *part) {
      if (!joined.empty() && distance(joined.back(), p) <= merge_eps) {
        continue;
      }
      joined.push_back(p);
    }
  }
  return Polyline(std::move(joined));
}

}  // namespace scenmine
