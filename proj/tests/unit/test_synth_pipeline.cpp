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

#include "scenmine/config.hpp"
#include "scenmine/features_interaction.hpp"
#include "scenmine/lane_assignment.hpp"
#include "scenmine/map_index.hpp"
#include "scenmine/pipeline.hpp"
#include "scenmine/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <unordered_set>

using namespace scenmine;

namespace
{
std::size_t index_of(const Scenario & s, const std::string & id)
{
  for (std::size_t k = 0; k < s.agents.size(); ++k) {
    if (s.agents[k].agent_id == id) {
      return k;
    }
  }
  FAIL("missing agent " << id);
  return 0;
}
}  // namespace

TEST_CASE("synth documents are deterministic and valid")
{
  for (const auto kind : {SynthKind::leader_follower, SynthKind::crossing, SynthKind::cut_in,
                          SynthKind::random_mix, SynthKind::stop_and_go}) {
    SynthParams p;
    p.kind = kind;
    p.seed = 12;
    CHECK(gen_document(p) == gen_document(p));
    const auto s = gen_scenario(p);
    CHECK(validate_scenario(s).empty());
    CHECK(s.n_predict() >= 1);
    CHECK(s.agents.size() <= 16);
  }
  CHECK(synth_kind_from_string("cut_in") == SynthKind::cut_in);
  CHECK_THROWS_AS(synth_kind_from_string("roundabout"), std::invalid_argument);
  const auto a = gen_corpus(SynthKind::random_mix, 3, 5);
  const auto b = gen_corpus(SynthKind::random_mix, 3, 5);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(serialize_scenario(a[k]) == serialize_scenario(b[k]));
  }
  CHECK(a[0].scenario_id != a[1].scenario_id);
}

TEST_CASE("cut-in: ground truth avoids the merge, the probe does not")
{
  SynthParams p;
  p.kind = SynthKind::cut_in;
  const auto s = gen_scenario(p);
  const auto d = index_of(s, "defensive");
  const auto g = index_of(s, "aggressive");
  CHECK(detect_collisions(make_view(s.agents[d]), make_view(s.agents[g])).collision_count == 0);

  const MapIndex map(s);
  const auto split = split_history_future(s);
  const auto hist = assign_lane_sequence(view(s.agents[d], split.history), map, {});
  AgentTrack probe = s.agents[d];
  probe.states = future_extrapolate(s.agents[d], hist, map, s.dt, s.t_obs_idx, s.T_tot);
  CHECK(detect_collisions(make_view(probe), make_view(s.agents[g])).collision_count >= 1);
}

TEST_CASE("pipeline tables and score files round trip")
{
  PipelineConfig cfg;
  cfg.workers = 2;
  const auto corpus = gen_corpus(SynthKind::random_mix, 40, 3);
  const auto res = run_pipeline(corpus, cfg);
  REQUIRE(res.scores.size() == 40);
  CHECK(res.anomaly.individual.has_value());
  for (const auto & sc : res.scores) {
    for (const auto & a : sc.agents) {
      CHECK(a.score_ac == std::max(a.score_gt, a.score_as));
    }
  }

  const auto dir = std::filesystem::temp_directory_path() / "scenmine_unit_tables";
  std::filesystem::remove_all(dir);
  write_feature_tables(dir.string(), res.features);
  const auto back = read_feature_tables(dir.string());
  REQUIRE(back.size() == res.features.size());
  CHECK(back[5].agents.size() == res.features[5].agents.size());
  CHECK(back[5].pairs.size() == res.features[5].pairs.size());
  if (!back[5].agents.empty()) {
    CHECK(back[5].agents[0].gt == res.features[5].agents[0].gt);
  }
  std::filesystem::remove_all(dir);

  std::ostringstream out;
  write_scores_jsonl(out, res.scores);
  std::istringstream in(out.str());
  const auto scores = read_scores_jsonl(in);
  std::ostringstream again;
  write_scores_jsonl(again, scores);
  CHECK(again.str() == out.str());

  // Fitting on a subset records the partition and leaves the rest unused for fitting.
  std::unordered_set<std::string> fit;
  for (std::size_t k = 0; k < 20; ++k) {
    fit.insert(corpus[k].scenario_id);
  }
  const auto part = run_pipeline(corpus, cfg, &fit, "train");
  CHECK(part.anomaly.individual->fit_partition_id == "train");
}

TEST_CASE("number formatting")
{
  CHECK(format_number(0.1) == "0.1");
  CHECK(parse_number(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(kInf) == "inf");
  CHECK(parse_number("-inf") == -kInf);
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
  const auto squares = parallel_map(10, 3, [](std::size_t i) { return i * i; });
  CHECK(squares[9] == 81);
}
