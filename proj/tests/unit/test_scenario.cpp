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

#include "scenmine/scenario.hpp"
#include "scenmine/synth.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace scenmine;

namespace
{
const char * kMinimal = R"({"schema_version":1,"scenario_id":"tiny","dt":0.1,"t_obs_idx":1,"T_tot":3,
"agents":[{"agent_id":"a","agent_type":"vehicle","length":4.5,"width":2.0,"to_predict":true,
"states":[{"x":0,"y":0,"heading":0,"vx":1,"vy":0,"valid":true},
{"x":0.1,"y":0,"heading":0,"vx":1,"vy":0,"valid":true},
{"x":0.2,"y":0,"heading":0,"vx":1,"vy":0,"valid":true}]}],
"lanes":[{"lane_id":"l0","centerline":[[0,0],[10,0]],"speed_limit":10.0,"successors":[],
"predecessors":[],"lane_type":"surface_street"}],"map_features":[]})";

std::string replace(std::string s, const std::string & from, const std::string & to)
{
  s.replace(s.find(from), from.size(), to);
  return s;
}

bool has_code(const ValidationReport & r, const std::string & code)
{
  return std::any_of(r.begin(), r.end(), [&](const Violation & v) { return v.code == code; });
}
}  // namespace

TEST_CASE("minimal document parses")
{
  const auto p = parse_scenario(kMinimal);
  CHECK(p.warnings.empty());
  CHECK(p.scenario.agents.size() == 1);
  CHECK(p.scenario.T_tot == 3);
  CHECK(p.scenario.n_predict() == 1);
  REQUIRE(p.scenario.find_lane("l0") != nullptr);
  CHECK(*p.scenario.find_lane("l0")->speed_limit == 10.0);
}

TEST_CASE("t_obs_idx equal to T_tot is rejected")
{
  const auto doc = replace(kMinimal, "\"t_obs_idx\":1", "\"t_obs_idx\":3");
  try {
    parse_scenario(doc);
    FAIL("expected a parse error");
  } catch (const ParseError & e) {
    CHECK(std::string(e.what()).find("t_obs_idx out of range") != std::string::npos);
  }
}

TEST_CASE("dangling successor is dropped with one warning")
{
  const auto doc = replace(kMinimal, "\"successors\":[]", "\"successors\":[\"ghost\"]");
  const auto p = parse_scenario(doc);
  CHECK(p.warnings.size() == 1);
  CHECK(p.scenario.lanes[0].successors.empty());
}

TEST_CASE("malformed input names the field")
{
  const auto doc = replace(kMinimal, "\"width\":2.0", "\"width\":\"wide\"");
  try {
    parse_scenario(doc);
    FAIL("expected a parse error");
  } catch (const ParseError & e) {
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("{not json"), ParseError);
}

TEST_CASE("serialize and parse round trip")
{
  SynthParams p;
  p.kind = SynthKind::random_mix;
  p.seed = 99;
  const Scenario s = gen_scenario(p);
  const std::string doc = serialize_scenario(s);
  const auto back = parse_scenario(doc);
  CHECK(serialize_scenario(back.scenario) == doc);
  CHECK(back.scenario.agents.size() == s.agents.size());
}

TEST_CASE("validation codes")
{
  using test::cv_track;
  auto s = test::make_scenario({cv_track("a", {0, 0}, {10, 0}, 91, 0.1, true)});
  CHECK(validate_scenario(s).empty());

  auto none = s;
  for (auto & st : none.agents[0].states) {
    st.valid = false;
  }
  CHECK(has_code(validate_scenario(none), "NO_VALID_STATES"));

  auto dup = s;
  dup.agents.push_back(dup.agents[0]);
  CHECK(has_code(validate_scenario(dup), "DUPLICATE_AGENT_ID"));
}

TEST_CASE("history and future partition the timebase")
{
  auto s = test::make_scenario({test::cv_track("a", {0, 0}, {1, 0}, 91, 0.1, true)});
  const auto split = split_history_future(s);
  CHECK(split.history.size() == 11);
  CHECK(split.future.size() == 80);
  CHECK(split.history.end == split.future.begin);
  CHECK(split.future.end == 91);
  CHECK(split.history.contains(10));
  CHECK(split.future.contains(11));
}
