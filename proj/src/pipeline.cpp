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

#include "scenmine/pipeline.hpp"

#include "scenmine/features_individual.hpp"
#include "scenmine/features_interaction.hpp"
#include "scenmine/lane_assignment.hpp"
#include "scenmine/map_index.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace scenmine
{

std::size_t ScenarioFeatureSet::n_predict() const
{
  return static_cast<std::size_t>(
    std::count_if(agents.begin(), agents.end(), [](const auto & a) { return a.to_predict; }));
}

int resolve_workers(int requested)
{
  if (requested > 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string format_number(double v)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_number(std::string_view text)
{
  double v = 0.0;
  const auto * end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw DataError("bad number '" + std::string(text) + "'");
  }
  return v;
}

ScenarioFeatureSet extract_scenario_features(
  const Scenario & s, const PipelineConfig & config, bool keep_primitives)
{
  ScenarioFeatureSet set;
  set.scenario_id = s.scenario_id;
  const MapIndex map(s);
  const TimeSplit split = split_history_future(s);
  const std::size_t n = s.agents.size();
  const auto dist = min_distance_to_predict(s);

  std::vector<std::vector<AgentState>> fe_tracks(n);
  std::vector<std::vector<std::optional<double>>> gt_speed(n);
  std::vector<std::vector<std::optional<double>>> fe_speed(n);
  set.agents.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const AgentTrack & track = s.agents[a];
    AgentRecord & rec = set.agents[a];
    rec.agent_id = track.agent_id;
    rec.to_predict = track.to_predict;
    rec.min_dist_to_predict = dist[a];

    const auto gt_seq = assign_lane_sequence(track.states, map, config.assignment);
    rec.gt = extract_individual_features(track.states, gt_seq, map, s.dt, config.individual)
               .values();

    const auto hist_seq =
      assign_lane_sequence(view(track, split.history), map, config.assignment);
    fe_tracks[a] =
      future_extrapolate(track, hist_seq, map, s.dt, s.t_obs_idx, s.T_tot, config.extrapolation);
    const auto fe_seq = assign_lane_sequence(fe_tracks[a], map, config.assignment);
    rec.fe = extract_individual_features(fe_tracks[a], fe_seq, map, s.dt, config.individual)
               .values();

    gt_speed[a] = kinematic_profile(track.states, s.dt).speed;
    fe_speed[a] = kinematic_profile(fe_tracks[a], s.dt).speed;
    if (keep_primitives && config.anomaly_enabled) {
      rec.gt_primitive = to_primitive(track.states, config.primitives.resample);
      rec.fe_primitive = to_primitive(fe_tracks[a], config.primitives.resample);
    }
  }

  auto gt_view = [&](std::size_t a) {
    return TrackView{s.agents[a].states, s.agents[a].length, s.agents[a].width, gt_speed[a]};
  };
  auto fe_view = [&](std::size_t a) {
    return TrackView{fe_tracks[a], s.agents[a].length, s.agents[a].width, fe_speed[a]};
  };
  const std::span<const MapFeature> features(s.map_features);
  for (const auto & p : find_interaction_pairs(s, config.interaction.gate_distance)) {
    PairRecord rec;
    rec.i = p.i;
    rec.j = p.j;
    rec.gt = extract_interaction_features(gt_view(p.i), gt_view(p.j), features, s.dt,
                                          config.interaction).values();
    rec.fe = extract_interaction_features(fe_view(p.i), fe_view(p.j), features, s.dt,
                                          config.interaction).values();
    rec.as_i = extract_interaction_features(fe_view(p.i), gt_view(p.j), features, s.dt,
                                            config.interaction).values();
    rec.as_j = extract_interaction_features(fe_view(p.j), gt_view(p.i), features, s.dt,
                                            config.interaction).values();
    set.pairs.push_back(rec);
  }
  return set;
}

namespace
{
// Evenly spaced picks of at most `cap` out of `count` items.
std::vector<std::size_t> stride_sample(std::size_t count, std::size_t cap)
{
  std::vector<std::size_t> out;
  if (count <= cap) {
    out.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      out[k] = k;
    }
    return out;
  }
  out.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) {
    out.push_back(static_cast<std::size_t>(
      static_cast<unsigned long long>(k) * count / cap));
  }
  return out;
}

bool accepted(const std::unordered_set<std::string> * ids, const std::string & id)
{
  return ids == nullptr || ids->count(id) > 0;
}

std::optional<PrimitiveModel> fit_model(
  const std::vector<std::vector<double>> & primitives, const PipelineConfig & config,
  const std::string & fit_partition_id, const std::string & what,
  std::vector<std::string> & warnings)
{
  if (primitives.empty()) {
    warnings.push_back("no " + what + " primitives to fit; anomaly left at 0");
    return std::nullopt;
  }
  PrimitiveParams params = config.primitives;
  params.seed = config.seed;
  if (primitives.size() < static_cast<std::size_t>(params.k)) {
    warnings.push_back(
      "only " + std::to_string(primitives.size()) + " " + what + " primitives; k reduced");
    params.k = static_cast<int>(primitives.size());
  }
  auto fit = fit_primitive_clusters(primitives, params, fit_partition_id);
  for (auto & w : fit.warnings) {
    warnings.push_back(what + ": " + w);
  }
  return std::move(fit.model);
}
}  // namespace

AnomalyModels fit_anomaly_models(
  const std::vector<Scenario> & scenarios, const std::vector<ScenarioFeatureSet> & sets,
  const PipelineConfig & config, const std::unordered_set<std::string> * fit_ids,
  const std::string & fit_partition_id)
{
  AnomalyModels models;
  if (!config.anomaly_enabled) {
    return models;
  }
  const auto cap = static_cast<std::size_t>(std::max(config.anomaly_max_fit_samples, 1));

  std::vector<const std::vector<double> *> pool;
  std::vector<std::pair<std::size_t, std::size_t>> pair_refs;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (!accepted(fit_ids, sets[k].scenario_id)) {
      continue;
    }
    for (const auto & a : sets[k].agents) {
      if (!a.gt_primitive.empty()) {
        pool.push_back(&a.gt_primitive);
      }
    }
    for (std::size_t p = 0; p < sets[k].pairs.size(); ++p) {
      pair_refs.emplace_back(k, p);
    }
  }

  std::vector<std::vector<double>> primitives;
  for (const auto idx : stride_sample(pool.size(), cap)) {
    primitives.push_back(*pool[idx]);
  }
  models.individual =
    fit_model(primitives, config, fit_partition_id, "individual", models.warnings);

  primitives.clear();
  for (const auto idx : stride_sample(pair_refs.size(), cap)) {
    const auto [k, p] = pair_refs[idx];
    const auto & pr = sets[k].pairs[p];
    primitives.push_back(to_pair_primitive(
      scenarios[k].agents[pr.i].states, scenarios[k].agents[pr.j].states,
      config.primitives.resample));
  }
  models.pair = fit_model(primitives, config, fit_partition_id, "pair", models.warnings);
  return models;
}

void apply_anomaly(
  const Scenario & s, ScenarioFeatureSet & set, const AnomalyModels & models,
  const PipelineConfig & config)
{
  constexpr std::size_t kAnomaly = 6;
  for (auto & a : set.agents) {
    if (models.individual && !a.gt_primitive.empty()) {
      a.gt[kAnomaly] = anomaly_score(a.gt_primitive, *models.individual);
      a.fe[kAnomaly] = anomaly_score(a.fe_primitive, *models.individual);
    }
    a.gt_primitive = {};
    a.fe_primitive = {};
  }
  if (!models.pair) {
    return;
  }
  for (auto & p : set.pairs) {
    const auto v = to_pair_primitive(
      s.agents[p.i].states, s.agents[p.j].states, config.primitives.resample);
    p.pair_anomaly = anomaly_score(v, *models.pair);
  }
}

FeatureNormalizer fit_normalizer(
  const std::vector<ScenarioFeatureSet> & sets, const PipelineConfig & config,
  const std::unordered_set<std::string> * fit_ids)
{
  std::vector<IndividualVector> ind;
  std::vector<InteractionVector> inter;
  for (const auto & set : sets) {
    if (!accepted(fit_ids, set.scenario_id)) {
      continue;
    }
    for (const auto & a : set.agents) {
      ind.push_back(a.gt);
      ind.push_back(a.fe);
    }
    for (const auto & p : set.pairs) {
      inter.push_back(p.gt);
      inter.push_back(p.fe);
      inter.push_back(p.as_i);
      inter.push_back(p.as_j);
    }
  }
  return FeatureNormalizer::fit(
    ind, inter, config.normalizer_epsilon, config.normalizer_q_low, config.normalizer_q_high,
    config.normalizer_min_span);
}

ScenarioScores score_features(
  const ScenarioFeatureSet & set, const FeatureNormalizer & norm, const ScoreWeights & weights)
{
  ScenarioScores out;
  const std::size_t n = set.agents.size();
  out.agents.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto & t = out.agents[a];
    t.agent_id = set.agents[a].agent_id;
    t.score_gt = individual_score(norm.normalize(set.agents[a].gt), weights);
    t.score_fe = individual_score(norm.normalize(set.agents[a].fe), weights);
    t.score_as = t.score_fe;
  }
  for (const auto & p : set.pairs) {
    const double gt = interaction_score(norm.normalize(p.gt), weights);
    const double fe = interaction_score(norm.normalize(p.fe), weights);
    out.agents[p.i].score_gt += gt;
    out.agents[p.j].score_gt += gt;
    out.agents[p.i].score_fe += fe;
    out.agents[p.j].score_fe += fe;
    out.agents[p.i].score_as += interaction_score(norm.normalize(p.as_i), weights);
    out.agents[p.j].score_as += interaction_score(norm.normalize(p.as_j), weights);
  }
  std::vector<double> w(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto & t = out.agents[a];
    t.score_ac = std::max(t.score_gt, t.score_as);
    w[a] = proximity_weight(set.agents[a].min_dist_to_predict);
  }

  SceneScore & scene = out.scene;
  scene.scenario_id = set.scenario_id;
  scene.n_agents = n;
  scene.n_predict = set.n_predict();
  std::vector<double> values(n);
  for (std::size_t v = 0; v < kScoreVariants.size(); ++v) {
    for (std::size_t a = 0; a < n; ++a) {
      values[a] = variant_value(out.agents[a], kScoreVariants[v]);
    }
    scene.variants[v] = scene_value(values, w, scene.n_predict);
  }
  scene.value = scene.variants[4];
  return out;
}

CorpusResult run_pipeline(
  const std::vector<Scenario> & scenarios, const PipelineConfig & config,
  const std::unordered_set<std::string> * fit_ids, const std::string & fit_partition_id)
{
  CorpusResult r;
  r.features = parallel_map(scenarios.size(), config.workers, [&](std::size_t k) {
    return extract_scenario_features(scenarios[k], config);
  });
  r.anomaly = fit_anomaly_models(scenarios, r.features, config, fit_ids, fit_partition_id);
  parallel_map(scenarios.size(), config.workers, [&](std::size_t k) {
    apply_anomaly(scenarios[k], r.features[k], r.anomaly, config);
    return 0;
  });
  r.normalizer = fit_normalizer(r.features, config, fit_ids);
  r.scores = parallel_map(r.features.size(), config.workers, [&](std::size_t k) {
    return score_features(r.features[k], r.normalizer, config.weights);
  });
  r.warnings = r.anomaly.warnings;
  r.warnings.insert(r.warnings.end(), r.normalizer.warnings().begin(), r.normalizer.warnings().end());
  return r;
}

namespace
{
void check_field(const std::string & v, const char * what)
{
  if (v.find_first_of(",\n\r") != std::string::npos) {
    throw DataError(std::string(what) + " '" + v + "' contains a comma or newline");
  }
}

std::vector<std::string_view> split_csv(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto c = line.find(',', start);
    if (c == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, c - start));
    start = c + 1;
  }
}

constexpr const char * kIndividualHeader = "scenario_id,agent_id,feature,value";
constexpr const char * kInteractionHeader = "scenario_id,agent_i,agent_j,feature,value";

template <std::size_t N>
void append_rows(
  std::string & out, const std::string & prefix, const char * variant,
  const std::array<double, N> & values, const std::array<std::string_view, N> & names)
{
  for (std::size_t f = 0; f < N; ++f) {
    out += prefix;
    out += variant;
    out += '.';
    out += names[f];
    out += ',';
    out += format_number(values[f]);
    out += '\n';
  }
}

std::ofstream open_out(const std::filesystem::path & p)
{
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    throw DataError("cannot write " + p.string());
  }
  return f;
}
}  // namespace

void write_feature_tables(const std::string & dir, const std::vector<ScenarioFeatureSet> & sets)
{
  std::filesystem::create_directories(dir);
  auto ind = open_out(std::filesystem::path(dir) / "individual.csv");
  auto inter = open_out(std::filesystem::path(dir) / "interaction.csv");
  ind << kIndividualHeader << '\n';
  inter << kInteractionHeader << '\n';
  std::string buf;
  for (const auto & set : sets) {
    check_field(set.scenario_id, "scenario_id");
    buf.clear();
    for (const auto & a : set.agents) {
      check_field(a.agent_id, "agent_id");
      const std::string prefix = set.scenario_id + ',' + a.agent_id + ',';
      buf += prefix + "to_predict," + (a.to_predict ? "1" : "0") + '\n';
      buf += prefix + "min_dist_to_predict," + format_number(a.min_dist_to_predict) + '\n';
      append_rows(buf, prefix, "gt", a.gt, IndividualFeatures::kNames);
      append_rows(buf, prefix, "fe", a.fe, IndividualFeatures::kNames);
    }
    ind << buf;
    buf.clear();
    for (const auto & p : set.pairs) {
      const std::string prefix =
        set.scenario_id + ',' + set.agents[p.i].agent_id + ',' + set.agents[p.j].agent_id + ',';
      append_rows(buf, prefix, "gt", p.gt, InteractionFeatures::kNames);
      append_rows(buf, prefix, "fe", p.fe, InteractionFeatures::kNames);
      append_rows(buf, prefix, "as_i", p.as_i, InteractionFeatures::kNames);
      append_rows(buf, prefix, "as_j", p.as_j, InteractionFeatures::kNames);
      buf += prefix + "diag.pair_anomaly," + format_number(p.pair_anomaly) + '\n';
    }
    inter << buf;
  }
  if (!ind || !inter) {
    throw DataError("failed writing feature tables to " + dir);
  }
}

namespace
{
template <std::size_t N>
std::optional<std::size_t> feature_index(
  std::string_view name, const std::array<std::string_view, N> & names)
{
  for (std::size_t f = 0; f < N; ++f) {
    if (names[f] == name) {
      return f;
    }
  }
  return std::nullopt;
}

std::ifstream open_in(const std::filesystem::path & p, const char * header)
{
  std::ifstream f(p, std::ios::binary);
  if (!f) {
    throw DataError("cannot read " + p.string());
  }
  std::string line;
  std::getline(f, line);
  if (line != header) {
    throw DataError(p.string() + ": unexpected header");
  }
  return f;
}
}  // namespace

std::vector<ScenarioFeatureSet> read_feature_tables(const std::string & dir)
{
  std::vector<ScenarioFeatureSet> sets;
  std::unordered_map<std::string, std::size_t> set_index;
  std::vector<std::unordered_map<std::string, std::size_t>> agent_index;

  auto ind = open_in(std::filesystem::path(dir) / "individual.csv", kIndividualHeader);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(ind, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 4) {
      throw DataError("individual.csv line " + std::to_string(line_no) + ": expected 4 fields");
    }
    const std::string sid(f[0]);
    auto [it, fresh] = set_index.emplace(sid, sets.size());
    if (fresh) {
      sets.push_back({sid, {}, {}});
      agent_index.emplace_back();
    }
    auto & set = sets[it->second];
    auto [ait, afresh] = agent_index[it->second].emplace(std::string(f[1]), set.agents.size());
    if (afresh) {
      set.agents.push_back({});
      set.agents.back().agent_id = std::string(f[1]);
    }
    auto & rec = set.agents[ait->second];
    const std::string_view name = f[2];
    const double value = parse_number(f[3]);
    if (name == "to_predict") {
      rec.to_predict = value != 0.0;
      continue;
    }
    if (name == "min_dist_to_predict") {
      rec.min_dist_to_predict = value;
      continue;
    }
    const auto dot_pos = name.find('.');
    const auto variant = name.substr(0, dot_pos);
    const auto idx = dot_pos == std::string_view::npos
                       ? std::nullopt
                       : feature_index(name.substr(dot_pos + 1), IndividualFeatures::kNames);
    if (!idx || (variant != "gt" && variant != "fe")) {
      throw DataError(
        "individual.csv line " + std::to_string(line_no) + ": unknown feature " +
        std::string(name));
    }
    (variant == "gt" ? rec.gt : rec.fe)[*idx] = value;
  }

  auto inter = open_in(std::filesystem::path(dir) / "interaction.csv", kInteractionHeader);
  std::vector<std::unordered_map<std::string, std::size_t>> pair_index(sets.size());
  line_no = 1;
  while (std::getline(inter, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv(line);
    const std::string where = "interaction.csv line " + std::to_string(line_no);
    if (f.size() != 5) {
      throw DataError(where + ": expected 5 fields");
    }
    const auto sit = set_index.find(std::string(f[0]));
    if (sit == set_index.end()) {
      throw DataError(where + ": unknown scenario " + std::string(f[0]));
    }
    auto & set = sets[sit->second];
    const auto & agents = agent_index[sit->second];
    const auto ai = agents.find(std::string(f[1]));
    const auto aj = agents.find(std::string(f[2]));
    if (ai == agents.end() || aj == agents.end()) {
      throw DataError(where + ": unknown agent");
    }
    const std::string key = std::string(f[1]) + ',' + std::string(f[2]);
    auto [pit, fresh] = pair_index[sit->second].emplace(key, set.pairs.size());
    if (fresh) {
      set.pairs.push_back({});
      set.pairs.back().i = ai->second;
      set.pairs.back().j = aj->second;
    }
    auto & rec = set.pairs[pit->second];
    const std::string_view name = f[3];
    const double value = parse_number(f[4]);
    if (name == "diag.pair_anomaly") {
      rec.pair_anomaly = value;
      continue;
    }
    const auto dot_pos = name.find('.');
    const auto idx = dot_pos == std::string_view::npos
                       ? std::nullopt
                       : feature_index(name.substr(dot_pos + 1), InteractionFeatures::kNames);
    const auto variant = name.substr(0, dot_pos);
    InteractionVector * target = nullptr;
    if (variant == "gt") {
      target = &rec.gt;
    } else if (variant == "fe") {
      target = &rec.fe;
    } else if (variant == "as_i") {
      target = &rec.as_i;
    } else if (variant == "as_j") {
      target = &rec.as_j;
    }
    if (!idx || target == nullptr) {
      throw DataError(where + ": unknown feature " + std::string(name));
    }
    (*target)[*idx] = value;
  }
  return sets;
}

void write_scores_jsonl(std::ostream & out, const std::vector<ScenarioScores> & scores)
{
  for (const auto & sc : scores) {
    nlohmann::ordered_json j;
    j["scenario_id"] = sc.scene.scenario_id;
    j["value"] = sc.scene.value;
    j["n_agents"] = sc.scene.n_agents;
    j["n_predict"] = sc.scene.n_predict;
    nlohmann::ordered_json variants;
    for (std::size_t v = 0; v < kScoreVariants.size(); ++v) {
      variants[std::string(to_string(kScoreVariants[v]))] = sc.scene.variants[v];
    }
    j["variants"] = std::move(variants);
    auto agents = nlohmann::ordered_json::array();
    for (const auto & a : sc.agents) {
      nlohmann::ordered_json aj;
      aj["agent_id"] = a.agent_id;
      aj["gt"] = a.score_gt;
      aj["fe"] = a.score_fe;
      aj["as"] = a.score_as;
      aj["ac"] = a.score_ac;
      agents.push_back(std::move(aj));
    }
    j["agents"] = std::move(agents);
    out << j.dump() << '\n';
  }
}

std::vector<ScenarioScores> read_scores_jsonl(std::istream & in)
{
  std::vector<ScenarioScores> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(line);
      ScenarioScores sc;
      sc.scene.scenario_id = j.at("scenario_id").get<std::string>();
      sc.scene.value = j.at("value").get<double>();
      sc.scene.n_agents = j.at("n_agents").get<std::size_t>();
      sc.scene.n_predict = j.at("n_predict").get<std::size_t>();
      const auto & variants = j.at("variants");
      for (std::size_t v = 0; v < kScoreVariants.size(); ++v) {
        sc.scene.variants[v] = variants.at(std::string(to_string(kScoreVariants[v]))).get<double>();
      }
      for (const auto & aj : j.at("agents")) {
        TrajectoryScoreSet a;
        a.agent_id = aj.at("agent_id").get<std::string>();
        a.score_gt = aj.at("gt").get<double>();
        a.score_fe = aj.at("fe").get<double>();
        a.score_as = aj.at("as").get<double>();
        a.score_ac = aj.at("ac").get<double>();
        sc.agents.push_back(std::move(a));
      }
      out.push_back(std::move(sc));
    } catch (const nlohmann::json::exception & e) {
      throw DataError("scores line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace scenmine
