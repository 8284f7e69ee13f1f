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

#include "scenmine/features_individual.hpp"
#include "scenmine/lane_assignment.hpp"
#include "scenmine/map_index.hpp"

#include "support.hpp"

#include <doctest.h>

#include <vector>

using namespace scenmine;
using test::make_lane;

TEST_CASE("constant velocity kinematics")
{
  const auto tr = test::cv_track("a", {0, 0}, {6, 8}, 30);
  const auto k = kinematic_profile(tr.states, 0.1);
  CHECK_FALSE(k.speed[0].has_value());
  for (std::size_t t = 1; t < 30; ++t) {
    CHECK(*k.speed[t] == doctest::Approx(10.0));
  }
  for (std::size_t t = 2; t < 30; ++t) {
    CHECK(*k.accel[t] == doctest::Approx(0.0).epsilon(1e-9));
  }
  for (std::size_t t = 3; t < 30; ++t) {
    CHECK(*k.jerk[t] == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("linear speed ramp")
{
  std::vector<Vec2> pts;
  for (int t = 0; t <= 50; ++t) {
    const double time = 0.1 * t;
    pts.push_back({time * time, 0.0});  // accel 2 m/s^2
  }
  const auto tr = test::path_track("a", pts);
  const auto k = kinematic_profile(tr.states, 0.1);
  for (std::size_t t = 2; t < k.accel.size(); ++t) {
    CHECK(*k.accel[t] == doctest::Approx(2.0));
  }
  for (std::size_t t = 3; t < k.jerk.size(); ++t) {
    CHECK(*k.jerk[t] == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("invalid step masks the entries that difference across it")
{
  auto tr = test::cv_track("a", {0, 0}, {10, 0}, 20);
  tr.states[8].valid = false;
  const auto k = kinematic_profile(tr.states, 0.1);
  CHECK_FALSE(k.speed[8].has_value());
  CHECK_FALSE(k.speed[9].has_value());
  CHECK(k.speed[7].has_value());
  CHECK(k.speed[10].has_value());
  CHECK(k.accel[7].has_value());
  CHECK_FALSE(k.accel[8].has_value());
  CHECK_FALSE(k.accel[9].has_value());
  CHECK_FALSE(k.accel[10].has_value());
  CHECK(k.accel[11].has_value());
}

TEST_CASE("waiting period near a crosswalk")
{
  auto tr = test::cv_track("a", {0, 0}, {0, 0}, 31);
  auto s = test::make_scenario({tr}, {make_lane("l", {{-50, 0}, {50, 0}})}, 31);
  s.map_features.push_back({"cw", MapFeatureKind::crosswalk, {{2, -3}, {5, -3}, {5, 3}, {2, 3}}});
  const MapIndex map(s);
  const auto k = kinematic_profile(tr.states, 0.1);
  CHECK(waiting_period(tr.states, k, map, 0.1) == doctest::Approx(3.0));

  auto far = s;
  far.map_features[0].geometry = {{20, -3}, {23, -3}, {23, 3}, {20, 3}};
  const MapIndex far_map(far);
  CHECK(waiting_period(tr.states, k, far_map, 0.1) == 0.0);

  const auto moving = test::cv_track("b", {0, 0}, {1, 0}, 31);
  const auto km = kinematic_profile(moving.states, 0.1);
  CHECK(waiting_period(moving.states, km, map, 0.1) == 0.0);
}

TEST_CASE("speed limit excess")
{
  const auto fast = test::cv_track("a", {0, 0}, {15, 0}, 40);
  const auto slow = test::cv_track("b", {0, 0}, {10, 0}, 40);
  const auto s = test::make_scenario({fast, slow}, {make_lane("l", {{-10, 0}, {200, 0}}, 13.4)}, 40);
  const MapIndex map(s);
  const auto seq_f = assign_lane_sequence(fast.states, map, {});
  const auto seq_s = assign_lane_sequence(slow.states, map, {});
  CHECK(speed_limit_excess(kinematic_profile(fast.states, 0.1), seq_f, map).value ==
        doctest::Approx(1.6));
  CHECK(speed_limit_excess(kinematic_profile(slow.states, 0.1), seq_s, map).value == 0.0);

  auto ped = test::cv_track("p", {0, 40}, {1, 0}, 40);
  ped.agent_type = AgentType::pedestrian;
  const auto seq_p = assign_lane_sequence(ped.states, map, {});
  const auto ex = speed_limit_excess(kinematic_profile(ped.states, 0.1), seq_p, map);
  CHECK(ex.value == 0.0);
  CHECK(ex.unassigned);
}

TEST_CASE("lane following fraction")
{
  std::vector<LaneRelativeState> on(10, LaneRelativeState{0.0, 0.0, true});
  CHECK(lane_following_fraction(on) == 1.0);
  auto half = on;
  for (std::size_t i = 0; i < 5; ++i) {
    half[i].d = 3.5;
  }
  CHECK(lane_following_fraction(half) == doctest::Approx(0.5));
  CHECK(lane_following_fraction({}) == 0.0);

  const auto tr = test::cv_track("a", {0, 0.3}, {10, 0}, 20);
  const auto s = test::make_scenario({tr}, {make_lane("l", {{-10, 0}, {200, 0}})}, 20);
  const MapIndex map(s);
  const auto f = extract_individual_features(tr.states, assign_lane_sequence(tr.states, map, {}), map, 0.1);
  CHECK(f.lane_following_fraction == 1.0);
  CHECK(f.max_speed == doctest::Approx(10.0));
  CHECK(f.anomaly == 0.0);
}
