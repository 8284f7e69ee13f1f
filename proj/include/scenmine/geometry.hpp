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

#ifndef SCENMINE__GEOMETRY_HPP_
#define SCENMINE__GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace scenmine
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator/(double k) const { return {x / k, y / k}; }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 & a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2 & a, const Vec2 & b) { return norm(a - b); }
constexpr Vec2 left_normal(const Vec2 & u) { return {-u.y, u.x}; }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }
inline Vec2 rotate(const Vec2 & p, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Closest point on segment [a, b] to p, as the clamped parameter t in [0, 1].
double segment_parameter(const Vec2 & p, const Vec2 & a, const Vec2 & b);
double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b);

/// Intersection point of segments [a0, a1] and [b0, b1], endpoints included.
/// Parallel (including collinear) segments report no intersection point.
std::optional<Vec2> segment_intersection(
  const Vec2 & a0, const Vec2 & a1, const Vec2 & b0, const Vec2 & b1);

/// True when the closed segments share at least one point, collinear overlap included.
bool segments_touch(const Vec2 & a0, const Vec2 & a1, const Vec2 & b0, const Vec2 & b1);

/// Even-odd rule; points on the boundary may go either way.
bool point_in_polygon(const Vec2 & p, std::span<const Vec2> polygon);

/// Zero inside the polygon, else distance to the nearest edge. A single vertex
/// degenerates to point distance, two vertices to segment distance.
double point_polygon_distance(const Vec2 & p, std::span<const Vec2> polygon);

/// True when no two non-adjacent edges of the closed polygon touch.
bool is_simple_polygon(std::span<const Vec2> polygon);

Vec2 centroid(std::span<const Vec2> points);

struct AxisBox
{
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void extend(const Vec2 & p)
  {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  AxisBox inflated(double margin) const
  {
    return {{lo.x - margin, lo.y - margin}, {hi.x + margin, hi.y + margin}};
  }
  bool contains(const Vec2 & p) const
  {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool overlaps(const AxisBox & o) const
  {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
  }
};

/// Agent footprint: a length x width rectangle centred on `center`, long axis along `heading`.
struct OrientedBox
{
  Vec2 center;
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  std::array<Vec2, 4> corners() const;
};

/// Separating-axis test on the four face normals. Touching counts as overlap.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

}  // namespace scenmine

#endif  // SCENMINE__GEOMETRY_HPP_
