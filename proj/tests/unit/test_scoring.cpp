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

#include "scenmine/lane_assignment.hpp"
#include "scenmine/map_index.hpp"
#include "scenmine/scoring.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

using namespace scenmine;
using test::make_lane;

namespace
{
FeatureNormalizer ramp_normalizer()
{
  // Rows 0..100 per feature so the quantile anchors are easy to state.
  std::vector<IndividualVector> ind;
  std::vector<InteractionVector> inter;
  for (int k = 0; k <= 100; ++k) {
    IndividualVector a;
    a.fill(k);
    a[5] = k / 100.0;
    ind.push_back(a);
    InteractionVector b;
    b.fill(k);
    inter.push_back(b);
  }
  return FeatureNormalizer::fit(ind, inter);
}
}  // namespace

TEST_CASE("normalizer orientation and anchors")
{
  const auto n = ramp_normalizer();
  const auto & speed = n.individual_scales()[0];
  CHECK(speed.orientation == Orientation::identity);
  CHECK(speed.apply(5.0, 0.1) == doctest::Approx(0.0));
  CHECK(speed.apply(95.0, 0.1) == doctest::Approx(1.0));
  CHECK(speed.apply(50.0, 0.1) == doctest::Approx(0.5));
  CHECK(speed.apply(500.0, 0.1) == 1.0);
  CHECK(n.individual_scales()[5].orientation == Orientation::negate);
  const auto & ttc = n.interaction_scales()[1];
  CHECK(ttc.orientation == Orientation::inverse);
  CHECK(ttc.apply(std::numeric_limits<double>::infinity(), 0.1) == 0.0);
  CHECK(n.interaction_scales()[2].orientation == Orientation::identity);
}

TEST_CASE("inverse orientation plug-in value")
{
  FeatureScale s;
  s.orientation = Orientation::inverse;
  s.lo = 0.1;
  s.hi = 2.0;
  CHECK(s.apply(0.4, 0.1) == doctest::Approx(1.0));
  CHECK(s.apply(9.9, 0.1) == doctest::Approx(0.0));
}

TEST_CASE("degenerate and constant features")
{
  std::vector<IndividualVector> ind(100, IndividualVector{});
  ind[99][0] = 3.0;  // p05 == p95 == 0, next larger value is 3
  const std::vector<InteractionVector> inter(5, InteractionVector{});
  const auto n = FeatureNormalizer::fit(ind, inter);
  CHECK(n.individual_scales()[0].hi == 3.0);
  CHECK_FALSE(n.individual_scales()[0].constant);
  CHECK(n.individual_scales()[1].constant);
  CHECK(n.individual_scales()[1].apply(42.0, 0.1) == 0.5);
  CHECK_FALSE(n.warnings().empty());
  CHECK_THROWS_AS(FeatureNormalizer::fit({}, inter), std::invalid_argument);

  // Spreads at rounding level stay near zero instead of filling [0, 1].
  std::vector<IndividualVector> noisy(10, IndividualVector{});
  for (std::size_t k = 0; k < noisy.size(); ++k) {
    noisy[k][1] = 1e-12 * static_cast<double>(k);
  }
  const auto nn = FeatureNormalizer::fit(noisy, inter);
  CHECK(nn.individual_scales()[1].apply(9e-12, 0.1) < 1e-6);
}

TEST_CASE("normalizer json round trip")
{
  const auto n = ramp_normalizer();
  const auto back = FeatureNormalizer::from_json(n.to_json());
  for (std::size_t f = 0; f < kNumIndividual; ++f) {
    CHECK(back.individual_scales()[f].lo == n.individual_scales()[f].lo);
    CHECK(back.individual_scales()[f].hi == n.individual_scales()[f].hi);
  }
  CHECK(back.to_json() == n.to_json());
}

TEST_CASE("trajectory score arithmetic")
{
  const auto n = ramp_normalizer();
  ScoreWeights w;
  // Least critical everywhere.
  IndividualVector calm{};
  calm[5] = 1.0;
  CHECK(trajectory_score(calm, {}, n, w) == doctest::Approx(0.0));
  // Every feature at its most critical anchor, one pair: 7 + 6.
  IndividualVector hot;
  hot.fill(100.0);
  hot[5] = 0.0;
  InteractionVector pair;
  pair.fill(100.0);
  for (const std::size_t f : {0, 1, 3, 4}) {
    pair[f] = 0.0;
  }
  const std::vector<InteractionVector> pairs{pair};
  const double base = trajectory_score(hot, pairs, n, w);
  CHECK(base == doctest::Approx(13.0));
  ScoreWeights w2 = w;
  for (auto & x : w2.individual) {
    x *= 2.0;
  }
  for (auto & x : w2.interaction) {
    x *= 2.0;
  }
  CHECK(trajectory_score(hot, pairs, n, w2) == doctest::Approx(2.0 * base));
}

TEST_CASE("scene value")
{
  const std::vector<double> scores{2.0, 1.0, 0.5};
  const std::vector<double> weights{proximity_weight(0.0), proximity_weight(4.0), proximity_weight(9.0)};
  CHECK(scene_value(scores, weights, 1) == doctest::Approx(2.25 / (1.0 + std::sqrt(2.0))));
  const std::vector<double> zeros(3, 0.0);
  CHECK(scene_value(zeros, weights, 1) == 0.0);
  CHECK(proximity_weight(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("score variants")
{
  TrajectoryScoreSet s{"a", 1.0, 3.0, 2.0, 2.0};
  CHECK(s.combined() == 3.0);
  CHECK(variant_value(s, ScoreVariant::gt) == 1.0);
  CHECK(variant_value(s, ScoreVariant::fe) == 3.0);
  CHECK(variant_value(s, ScoreVariant::combined) == 3.0);
  CHECK(variant_value(s, ScoreVariant::asymmetric) == 2.0);
  CHECK(variant_value(s, ScoreVariant::asymmetric_combined) == 2.0);
}

TEST_CASE("distance to predict agents")
{
  auto s = test::make_scenario(
    {test::cv_track("p", {0, 0}, {0, 0}, 20, 0.1, true), test::cv_track("q", {4, 0}, {0, 0}, 20),
     test::cv_track("r", {0, 9}, {0, 0}, 20)},
    {}, 20);
  const auto d = min_distance_to_predict(s);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(4.0));
  CHECK(d[2] == doctest::Approx(9.0));
}

TEST_CASE("future extrapolation on a straight lane is a fixed point")
{
  const auto tr = test::cv_track("a", {0, 0}, {10, 0}, 91);
  const auto s = test::make_scenario({tr}, {make_lane("l", {{-10, 0}, {1000, 0}})});
  const MapIndex map(s);
  const auto hist = assign_lane_sequence(std::span(tr.states).subspan(0, 11), map, {});
  const auto fe = future_extrapolate(tr, hist, map, 0.1, 10, 91);
  REQUIRE(fe.size() == 91);
  for (std::size_t t = 0; t < 91; ++t) {
    CHECK(std::hypot(fe[t].x - tr.states[t].x, fe[t].y - tr.states[t].y) < 1e-6);
  }
}

TEST_CASE("future extrapolation follows a curved lane")
{
  // Radius 50 arc, agent at 10 m/s along it.
  const double r = 50.0;
  std::vector<Vec2> arc;
  for (int k = 0; k <= 400; ++k) {
    const double a = -std::numbers::pi / 2 + std::numbers::pi * k / 400.0;
    arc.push_back({r * std::cos(a), r * std::sin(a) + r});
  }
  std::vector<Vec2> pts;
  for (int t = 0; t < 91; ++t) {
    const double a = -std::numbers::pi / 2 + 10.0 * 0.1 * t / r;
    pts.push_back({r * std::cos(a), r * std::sin(a) + r});
  }
  const auto tr = test::path_track("a", pts);
  const auto s = test::make_scenario({tr}, {make_lane("l", arc)});
  const MapIndex map(s);
  const auto hist = assign_lane_sequence(std::span(tr.states).subspan(0, 11), map, {});
  const auto fe = future_extrapolate(tr, hist, map, 0.1, 10, 91);
  for (std::size_t t = 11; t < 91; ++t) {
    // Chord-sampled lane: allow the polyline's sagitta.
    CHECK(std::hypot(fe[t].x - pts[t].x, fe[t].y - pts[t].y) < 0.05);
  }
}

TEST_CASE("unassigned agents extrapolate in Cartesian space")
{
  auto ped = test::cv_track("p", {0, 0}, {10, 0}, 91);
  ped.agent_type = AgentType::pedestrian;
  const auto s = test::make_scenario({ped}, {make_lane("l", {{0, 100}, {100, 100}})});
  const MapIndex map(s);
  const auto hist = assign_lane_sequence(std::span(ped.states).subspan(0, 11), map, {});
  REQUIRE_FALSE(hist.assigned);
  const auto fe = future_extrapolate(ped, hist, map, 0.1, 10, 91);
  for (std::size_t t = 11; t < 91; ++t) {
    CHECK(fe[t].x == doctest::Approx(static_cast<double>(t)));
    CHECK(fe[t].y == doctest::Approx(0.0));
  }
}
