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
#include "scenmine/lane_geometry.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace scenmine;

TEST_CASE("normalize_angle wraps into (-pi, pi]")
{
  const double pi = std::numbers::pi;
  CHECK(normalize_angle(3.0 * pi) == doctest::Approx(pi));
  CHECK(normalize_angle(-pi) == doctest::Approx(pi));
  CHECK(normalize_angle(0.5) == doctest::Approx(0.5));
  CHECK(normalize_angle(-2.0 * pi - 0.25) == doctest::Approx(-0.25));
}

TEST_CASE("segment intersection and touching")
{
  const auto hit = segment_intersection({-1, 0}, {1, 0}, {0, -1}, {0, 1});
  REQUIRE(hit.has_value());
  CHECK(hit->x == doctest::Approx(0.0));
  CHECK(hit->y == doctest::Approx(0.0));
  CHECK_FALSE(segment_intersection({0, 0}, {1, 0}, {0, 1}, {1, 1}).has_value());
  CHECK_FALSE(segment_intersection({0, 0}, {2, 0}, {1, 0}, {3, 0}).has_value());
  CHECK(segments_touch({0, 0}, {2, 0}, {1, 0}, {3, 0}));
  CHECK(segments_touch({0, 0}, {1, 0}, {1, 0}, {1, 5}));
  CHECK_FALSE(segments_touch({0, 0}, {1, 0}, {1.1, 0}, {2, 0}));
}

TEST_CASE("polygon helpers")
{
  const std::vector<Vec2> square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(point_in_polygon({1, 1}, square));
  CHECK_FALSE(point_in_polygon({3, 1}, square));
  CHECK(point_polygon_distance({1, 1}, square) == 0.0);
  CHECK(point_polygon_distance({5, 1}, square) == doctest::Approx(3.0));
  CHECK(is_simple_polygon(square));
  const std::vector<Vec2> bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  CHECK_FALSE(is_simple_polygon(bowtie));
  const Vec2 c = centroid(square);
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(1.0));
}

TEST_CASE("oriented boxes: separating axis")
{
  // 4 x 2 m boxes, heading 0.
  const OrientedBox a{{0, 0}, 0.0, 4.0, 2.0};
  CHECK(boxes_overlap(a, {{3, 0}, 0.0, 4.0, 2.0}));
  CHECK_FALSE(boxes_overlap(a, {{5, 0}, 0.0, 4.0, 2.0}));
  CHECK(boxes_overlap(a, {{4, 0}, 0.0, 4.0, 2.0}));  // touching
  // Rotated box whose corner reaches into a.
  const double r = std::numbers::pi / 4.0;
  CHECK(boxes_overlap(a, {{3.2, 0}, r, 2.0, 2.0}));
  CHECK_FALSE(boxes_overlap(a, {{3.5, 0}, r, 2.0, 2.0}));
  const auto k = a.corners();
  CHECK(k[0].x == doctest::Approx(2.0));
  CHECK(std::abs(k[0].y) == doctest::Approx(1.0));
}

TEST_CASE("polyline construction and arc length")
{
  CHECK_THROWS_AS(Polyline({{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}, {1, 0}}), std::invalid_argument);
  const Polyline p({{0, 0}, {3, 4}, {3, 10}});
  CHECK(p.length() == doctest::Approx(11.0));
  CHECK(p.segment_at(4.9) == 0);
  CHECK(p.segment_at(5.1) == 1);
  const Vec2 q = p.point_at(8.0);
  CHECK(q.x == doctest::Approx(3.0));
  CHECK(q.y == doctest::Approx(7.0));
  const Vec2 past = p.point_at(13.0);
  CHECK(past.y == doctest::Approx(12.0));
}

TEST_CASE("projection onto a straight lane")
{
  const Polyline lane({{0, 0}, {100, 0}});
  const auto a = project_to_polyline({5, 1}, lane);
  CHECK(a.s == doctest::Approx(5.0));
  CHECK(a.d == doctest::Approx(1.0));
  CHECK(a.overshoot == 0.0);
  const auto b = project_to_polyline({-3, 0}, lane);
  CHECK(b.s == 0.0);
  CHECK(b.d == doctest::Approx(0.0));
  CHECK(b.overshoot == doctest::Approx(-3.0));
  const auto c = project_to_polyline({104, -2}, lane);
  CHECK(c.s == doctest::Approx(100.0));
  CHECK(c.overshoot == doctest::Approx(4.0));
  CHECK(c.d == doctest::Approx(-2.0));
}

TEST_CASE("projection onto a quarter circle")
{
  // Radius 10 about the origin, counter-clockwise from (10, 0) to (0, 10).
  std::vector<Vec2> pts;
  const int n = 2000;
  for (int k = 0; k <= n; ++k) {
    const double a = std::numbers::pi / 2.0 * k / n;
    pts.push_back({10.0 * std::cos(a), 10.0 * std::sin(a)});
  }
  const Polyline arc(pts);
  const double h = std::numbers::pi / 4.0;
  const auto pr = project_to_polyline({11.0 * std::cos(h), 11.0 * std::sin(h)}, arc);
  CHECK(pr.s == doctest::Approx(10.0 * h).epsilon(1e-5));
  CHECK(pr.d == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("frenet encode on straight tracks")
{
  const Polyline lane({{0, 0}, {100, 0}});
  std::vector<AgentState> track;
  std::vector<AgentState> mirror;
  for (int t = 0; t < 10; ++t) {
    track.push_back({2.0 + 1.5 * t, 0.7, 0.0, 15.0, 0.0, true});
    mirror.push_back({2.0 + 1.5 * t, -0.7, 0.0, 15.0, 0.0, true});
  }
  track[4].valid = false;
  const auto f = frenet_encode(track, lane);
  const auto g = frenet_encode(mirror, lane);
  CHECK_FALSE(f[4].valid);
  for (int t = 1; t < 10; ++t) {
    if (t == 4 || t == 5) {
      continue;
    }
    CHECK(f[t].s - f[t - 1].s == doctest::Approx(1.5));
    CHECK(f[t].d == doctest::Approx(0.7));
    CHECK(g[t].d == doctest::Approx(-f[t].d));
    CHECK(g[t].s == doctest::Approx(f[t].s));
  }
}

TEST_CASE("frenet decode")
{
  const Polyline lane({{0, 0}, {100, 0}});
  const auto a = frenet_decode_one({5.0, 0.0, 0.0, true}, lane);
  CHECK(a.x == doctest::Approx(5.0));
  CHECK(a.y == doctest::Approx(0.0));
  CHECK(a.heading == doctest::Approx(0.0));
  const auto b = frenet_decode_one({5.0, 2.0, 0.0, true}, lane);
  CHECK(b.y == doctest::Approx(2.0));
  const auto c = frenet_decode_one({100.0, 0.0, 7.0, true}, lane);
  CHECK(c.x == doctest::Approx(107.0));
  CHECK_FALSE(frenet_decode_one({5.0, 0.0, 0.0, false}, lane).valid);
}

TEST_CASE("frenet round trip near a convex corner")
{
  const Polyline corner({{0, 0}, {10, 0}, {10, 10}});
  // Outer wedge of the vertex, plus points on the tie lines.
  for (const Vec2 p : {Vec2{11.5, -1.0}, Vec2{12.0, 0.0}, Vec2{10.0, -2.0}, Vec2{5.0, 1.0},
                       Vec2{9.0, 3.0}}) {
    const std::array<AgentState, 1> st{AgentState{p.x, p.y, 0, 0, 0, true}};
    const auto f = frenet_encode(st, corner);
    const auto back = frenet_decode_one(f[0], corner);
    CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
  }
}

TEST_CASE("concatenate_centerlines merges shared junction points")
{
  const std::vector<Vec2> a{{0, 0}, {10, 0}};
  const std::vector<Vec2> b{{10, 0}, {20, 0}};
  const std::array<const std::vector<Vec2> *, 2> parts{&a, &b};
  const auto p = concatenate_centerlines(parts);
  CHECK(p.points().size() == 3);
  CHECK(p.length() == doctest::Approx(20.0));
}
