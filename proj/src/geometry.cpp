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

#include "scenmine/geometry.hpp"

#include <algorithm>
#include <limits>

namespace scenmine
{

double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

double segment_parameter(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) {
    return 0.0;
  }
  return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const double t = segment_parameter(p, a, b);
  return distance(p, a + (b - a) * t);
}

std::optional<Vec2> segment_intersection(
  const Vec2 & a0, const Vec2 & a1, const Vec2 & b0, const Vec2 & b1)
{
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = cross(r, s);
  if (denom == 0.0) {
    return std::nullopt;
  }
  const Vec2 qp = b0 - a0;
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) {
    return std::nullopt;
  }
  return a0 + r * t;
}

namespace
{
int orientation(const Vec2 & a, const Vec2 & b, const Vec2 & c)
{
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vec2 & a, const Vec2 & b, const Vec2 & p)
{
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}
}  // namespace

bool segments_touch(const Vec2 & a0, const Vec2 & a1, const Vec2 & b0, const Vec2 & b1)
{
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) {
    return true;
  }
  return (o1 == 0 && on_segment(a0, a1, b0)) || (o2 == 0 && on_segment(a0, a1, b1)) ||
         (o3 == 0 && on_segment(b0, b1, a0)) || (o4 == 0 && on_segment(b0, b1, a1));
}

bool point_in_polygon(const Vec2 & p, std::span<const Vec2> polygon)
{
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = polygon[i];
    const Vec2 & b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double point_polygon_distance(const Vec2 & p, std::span<const Vec2> polygon)
{
  if (polygon.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  if (polygon.size() == 1) {
    return distance(p, polygon[0]);
  }
  if (polygon.size() >= 3 && point_in_polygon(p, polygon)) {
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polygon.size();
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) {
    best = std::min(best, point_segment_distance(p, polygon[i], polygon[(i + 1) % n]));
  }
  return best;
}

bool is_simple_polygon(std::span<const Vec2> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    return true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_touch(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

Vec2 centroid(std::span<const Vec2> points)
{
  Vec2 sum;
  for (const auto & p : points) {
    sum = sum + p;
  }
  return points.empty() ? sum : sum / static_cast<double>(points.size());
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const Vec2 u = unit_from_heading(heading) * (0.5 * length);
  const Vec2 v = left_normal(unit_from_heading(heading)) * (0.5 * width);
  return {center + u + v, center - u + v, center - u - v, center + u - v};
}

namespace
{
// Half-extent of a box projected onto a unit axis.
double projected_radius(const OrientedBox & b, const Vec2 & axis)
{
  const Vec2 u = unit_from_heading(b.heading);
  const Vec2 v = left_normal(u);
  return 0.5 * b.length * std::abs(dot(u, axis)) + 0.5 * b.width * std::abs(dot(v, axis));
}
}  // namespace

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 d = b.center - a.center;
  const Vec2 ua = unit_from_heading(a.heading);
  const Vec2 ub = unit_from_heading(b.heading);
  const std::array<Vec2, 4> axes{ua, left_normal(ua), ub, left_normal(ub)};
  for (const auto & axis : axes) {
    if (std::abs(dot(d, axis)) > projected_radius(a, axis) + projected_radius(b, axis)) {
      return false;
    }
  }
  return true;
}

}  // namespace scenmine
