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

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace scenmine
{

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AgentType t)
{
  switch (t) {
    case AgentType::vehicle:
      return "vehicle";
    case AgentType::pedestrian:
      return "pedestrian";
    case AgentType::cyclist:
      return "cyclist";
  }
  return "vehicle";
}

std::string_view to_string(LaneType t)
{
  switch (t) {
    case LaneType::surface_street:
      return "surface_street";
    case LaneType::freeway:
      return "freeway";
    case LaneType::bike_lane:
      return "bike_lane";
  }
  return "surface_street";
}

std::string_view to_string(MapFeatureKind k)
{
  switch (k) {
    case MapFeatureKind::crosswalk:
      return "crosswalk";
    case MapFeatureKind::stop_sign:
      return "stop_sign";
    case MapFeatureKind::speed_bump:
      return "speed_bump";
  }
  return "crosswalk";
}

std::size_t AgentTrack::valid_count() const
{
  return static_cast<std::size_t>(
    std::count_if(states.begin(), states.end(), [](const AgentState & s) { return s.valid; }));
}

std::size_t Scenario::n_predict() const
{
  return static_cast<std::size_t>(std::count_if(
    agents.begin(), agents.end(), [](const AgentTrack & a) { return a.to_predict; }));
}

const Lane * Scenario::find_lane(std::string_view lane_id) const
{
  const auto it = std::lower_bound(
    lanes.begin(), lanes.end(), lane_id,
    [](const Lane & l, std::string_view id) { return l.lane_id < id; });
  if (it == lanes.end() || it->lane_id != lane_id) {
    return nullptr;
  }
  return &*it;
}

namespace
{

[[noreturn]] void fail(const std::string & path, const std::string & what)
{
  throw ParseError(path + ": " + what);
}

const json & require(const json & obj, const char * key, const std::string & path)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(path + "." + key, "missing required field");
  }
  return *it;
}

double as_number(const json & v, const std::string & path)
{
  if (!v.is_number()) {
    fail(path, "expected number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    fail(path, "expected finite number");
  }
  return d;
}

std::string as_string(const json & v, const std::string & path)
{
  if (!v.is_string()) {
    fail(path, "expected string");
  }
  return v.get<std::string>();
}

int as_int(const json & v, const std::string & path)
{
  if (!v.is_number_integer()) {
    fail(path, "expected integer");
  }
  return v.get<int>();
}

bool as_bool(const json & v, const std::string & path)
{
  if (!v.is_boolean()) {
    fail(path, "expected boolean");
  }
  return v.get<bool>();
}

const json & as_array(const json & v, const std::string & path)
{
  if (!v.is_array()) {
    fail(path, "expected array");
  }
  return v;
}

Vec2 as_point(const json & v, const std::string & path)
{
  if (!v.is_array() || v.size() != 2) {
    fail(path, "expected [x, y]");
  }
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

std::vector<Vec2> as_points(const json & v, const std::string & path)
{
  std::vector<Vec2> out;
  const auto & arr = as_array(v, path);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(as_point(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

AgentType parse_agent_type(const json & v, const std::string & path)
{
  const auto s = as_string(v, path);
  if (s == "vehicle") return AgentType::vehicle;
  if (s == "pedestrian") return AgentType::pedestrian;
  if (s == "cyclist") return AgentType::cyclist;
  fail(path, "unknown agent_type '" + s + "'");
}

LaneType parse_lane_type(const json & v, const std::string & path)
{
  const auto s = as_string(v, path);
  if (s == "surface_street") return LaneType::surface_street;
  if (s == "freeway") return LaneType::freeway;
  if (s == "bike_lane") return LaneType::bike_lane;
  fail(path, "unknown lane_type '" + s + "'");
}

MapFeatureKind parse_feature_kind(const json & v, const std::string & path)
{
  const auto s = as_string(v, path);
  if (s == "crosswalk") return MapFeatureKind::crosswalk;
  if (s == "stop_sign") return MapFeatureKind::stop_sign;
  if (s == "speed_bump") return MapFeatureKind::speed_bump;
  fail(path, "unknown kind '" + s + "'");
}

// Fast path for well-formed states; anything unusual goes through the checked parser.
std::optional<AgentState> parse_state_fast(const json & v)
{
  if (!v.is_object()) {
    return std::nullopt;
  }
  const auto valid = v.find("valid");
  if (valid == v.end() || !valid->is_boolean()) {
    return std::nullopt;
  }
  AgentState st;
  st.valid = valid->get<bool>();
  if (!st.valid) {
    return st;
  }
  double f[5];
  const char * keys[5] = {"x", "y", "heading", "vx", "vy"};
  for (int k = 0; k < 5; ++k) {
    const auto it = v.find(keys[k]);
    if (it == v.end() || !it->is_number()) {
      return std::nullopt;
    }
    f[k] = it->get<double>();
    if (!std::isfinite(f[k])) {
      return std::nullopt;
    }
  }
  st.x = f[0];
  st.y = f[1];
  st.heading = normalize_angle(f[2]);
  st.vx = f[3];
  st.vy = f[4];
  return st;
}

AgentState parse_state(const json & v, const std::string & path)
{
  if (!v.is_object()) {
    fail(path, "expected object");
  }
  AgentState st;
  st.valid = as_bool(require(v, "valid", path), path + ".valid");
  if (!st.valid) {
    return st;
  }
  st.x = as_number(require(v, "x", path), path + ".x");
  st.y = as_number(require(v, "y", path), path + ".y");
  st.heading = normalize_angle(as_number(require(v, "heading", path), path + ".heading"));
  st.vx = as_number(require(v, "vx", path), path + ".vx");
  st.vy = as_number(require(v, "vy", path), path + ".vy");
  return st;
}

std::vector<std::string> parse_id_list(const json & v, const std::string & path)
{
  std::vector<std::string> out;
  const auto & arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(as_string(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

ParsedScenario parse_scenario(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ParseError(std::string("$: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    fail("$", "expected object");
  }
  const int version = as_int(require(doc, "schema_version", "$"), "$.schema_version");
  if (version != kSchemaVersion) {
    fail("$.schema_version", "unsupported schema version " + std::to_string(version));
  }

  ParsedScenario out;
  Scenario & s = out.scenario;
  s.scenario_id = as_string(require(doc, "scenario_id", "$"), "$.scenario_id");
  s.dt = as_number(require(doc, "dt", "$"), "$.dt");
  if (s.dt <= 0.0) {
    fail("$.dt", "must be positive");
  }
  s.T_tot = as_int(require(doc, "T_tot", "$"), "$.T_tot");
  s.t_obs_idx = as_int(require(doc, "t_obs_idx", "$"), "$.t_obs_idx");
  if (s.T_tot < 3) {
    fail("$.T_tot", "must be at least 3");
  }
  // The future window must be nonempty.
  if (s.t_obs_idx < 1 || s.t_obs_idx > s.T_tot - 2) {
    fail("$.t_obs_idx", "t_obs_idx out of range");
  }

  const auto & agents = as_array(require(doc, "agents", "$"), "$.agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "$.agents[" + std::to_string(i) + "]";
    const json & a = agents[i];
    if (!a.is_object()) {
      fail(path, "expected object");
    }
    AgentTrack track;
    track.agent_id = as_string(require(a, "agent_id", path), path + ".agent_id");
    track.agent_type = parse_agent_type(require(a, "agent_type", path), path + ".agent_type");
    track.length = as_number(require(a, "length", path), path + ".length");
    track.width = as_number(require(a, "width", path), path + ".width");
    if (track.length <= 0.0) {
      fail(path + ".length", "must be positive");
    }
    if (track.width <= 0.0) {
      fail(path + ".width", "must be positive");
    }
    track.to_predict = as_bool(require(a, "to_predict", path), path + ".to_predict");
    const auto & states = as_array(require(a, "states", path), path + ".states");
    if (states.size() != static_cast<std::size_t>(s.T_tot)) {
      fail(path + ".states", "expected " + std::to_string(s.T_tot) + " states, got " +
                               std::to_string(states.size()));
    }
    track.states.reserve(states.size());
    for (std::size_t t = 0; t < states.size(); ++t) {
      if (auto st = parse_state_fast(states[t])) {
        track.states.push_back(*st);
      } else {
        track.states.push_back(parse_state(states[t], path + ".states[" + std::to_string(t) + "]"));
      }
    }
    s.agents.push_back(std::move(track));
  }

  if (const auto it = doc.find("lanes"); it != doc.end()) {
    const auto & lanes = as_array(*it, "$.lanes");
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      const std::string path = "$.lanes[" + std::to_string(i) + "]";
      const json & l = lanes[i];
      if (!l.is_object()) {
        fail(path, "expected object");
      }
      Lane lane;
      lane.lane_id = as_string(require(l, "lane_id", path), path + ".lane_id");
      lane.centerline = as_points(require(l, "centerline", path), path + ".centerline");
      if (lane.centerline.size() < 2) {
        fail(path + ".centerline", "needs at least 2 points");
      }
      if (const auto sl = l.find("speed_limit"); sl != l.end() && !sl->is_null()) {
        lane.speed_limit = as_number(*sl, path + ".speed_limit");
      }
      if (const auto v = l.find("successors"); v != l.end()) {
        lane.successors = parse_id_list(*v, path + ".successors");
      }
      if (const auto v = l.find("predecessors"); v != l.end()) {
        lane.predecessors = parse_id_list(*v, path + ".predecessors");
      }
      if (const auto v = l.find("lane_type"); v != l.end()) {
        lane.lane_type = parse_lane_type(*v, path + ".lane_type");
      }
      s.lanes.push_back(std::move(lane));
    }
  }
  std::stable_sort(s.lanes.begin(), s.lanes.end(), [](const Lane & a, const Lane & b) {
    return a.lane_id < b.lane_id;
  });

  std::set<std::string> lane_ids;
  for (const auto & l : s.lanes) {
    lane_ids.insert(l.lane_id);
  }
  auto drop_dangling = [&](Lane & lane, std::vector<std::string> & refs, const char * field) {
    std::erase_if(refs, [&](const std::string & id) {
      if (lane_ids.count(id) != 0) {
        return false;
      }
      out.warnings.push_back(
        "lane '" + lane.lane_id + "' " + field + " references unknown lane '" + id + "'; dropped");
      return true;
    });
  };
  for (auto & lane : s.lanes) {
    drop_dangling(lane, lane.successors, "successor");
    drop_dangling(lane, lane.predecessors, "predecessor");
  }

  if (const auto it = doc.find("map_features"); it != doc.end()) {
    const auto & features = as_array(*it, "$.map_features");
    for (std::size_t i = 0; i < features.size(); ++i) {
      const std::string path = "$.map_features[" + std::to_string(i) + "]";
      const json & f = features[i];
      if (!f.is_object()) {
        fail(path, "expected object");
      }
      MapFeature feature;
      feature.feature_id = as_string(require(f, "feature_id", path), path + ".feature_id");
      feature.kind = parse_feature_kind(require(f, "kind", path), path + ".kind");
      const json & geom = require(f, "geometry", path);
      if (geom.is_array() && geom.size() == 2 && geom[0].is_number()) {
        feature.geometry.push_back(as_point(geom, path + ".geometry"));
      } else {
        feature.geometry = as_points(geom, path + ".geometry");
      }
      s.map_features.push_back(std::move(feature));
    }
  }

  for (const auto & v : validate_scenario(s)) {
    out.warnings.push_back(v.code + ": " + v.detail);
  }
  return out;
}

std::string serialize_scenario(const Scenario & s)
{
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["scenario_id"] = s.scenario_id;
  doc["dt"] = s.dt;
  doc["t_obs_idx"] = s.t_obs_idx;
  doc["T_tot"] = s.T_tot;
  ordered_json agents = ordered_json::array();
  for (const auto & a : s.agents) {
    ordered_json ja;
    ja["agent_id"] = a.agent_id;
    ja["agent_type"] = to_string(a.agent_type);
    ja["length"] = a.length;
    ja["width"] = a.width;
    ja["to_predict"] = a.to_predict;
    ordered_json states = ordered_json::array();
    for (const auto & st : a.states) {
      ordered_json js;
      if (st.valid) {
        js["x"] = st.x;
        js["y"] = st.y;
        js["heading"] = st.heading;
        js["vx"] = st.vx;
        js["vy"] = st.vy;
      }
      js["valid"] = st.valid;
      states.push_back(std::move(js));
    }
    ja["states"] = std::move(states);
    agents.push_back(std::move(ja));
  }
  doc["agents"] = std::move(agents);

  auto points = [](const std::vector<Vec2> & pts) {
    ordered_json arr = ordered_json::array();
    for (const auto & p : pts) {
      arr.push_back({p.x, p.y});
    }
    return arr;
  };
  ordered_json lanes = ordered_json::array();
  for (const auto & l : s.lanes) {
    ordered_json jl;
    jl["lane_id"] = l.lane_id;
    jl["centerline"] = points(l.centerline);
    jl["speed_limit"] = l.speed_limit ? ordered_json(*l.speed_limit) : ordered_json(nullptr);
    jl["successors"] = l.successors;
    jl["predecessors"] = l.predecessors;
    jl["lane_type"] = to_string(l.lane_type);
    lanes.push_back(std::move(jl));
  }
  doc["lanes"] = std::move(lanes);

  ordered_json features = ordered_json::array();
  for (const auto & f : s.map_features) {
    ordered_json jf;
    jf["feature_id"] = f.feature_id;
    jf["kind"] = to_string(f.kind);
    jf["geometry"] = points(f.geometry);
    features.push_back(std::move(jf));
  }
  doc["map_features"] = std::move(features);
  return doc.dump();
}

std::vector<ParsedScenario> load_scenario_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open");
  }
  std::vector<ParsedScenario> out;
  const bool jsonl = path.ends_with(".jsonl");
  if (!jsonl) {
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      out.push_back(parse_scenario(buf.str()));
    } catch (const ParseError & e) {
      throw ParseError(path + ": " + e.what());
    }
    return out;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(parse_scenario(line));
    } catch (const ParseError & e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ParsedScenario> load_scenario_dir(const std::string & dir)
{
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_regular_file(dir)) {
    files.push_back(dir);
  } else {
    if (!fs::is_directory(dir)) {
      throw ParseError(dir + ": not a file or directory");
    }
    for (const auto & entry : fs::directory_iterator(dir)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonl")) {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
  }
  std::vector<ParsedScenario> out;
  for (const auto & f : files) {
    auto part = load_scenario_file(f);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

ValidationReport validate_scenario(const Scenario & s)
{
  ValidationReport report;
  auto add = [&report](std::string code, std::string detail) {
    report.push_back({std::move(code), std::move(detail)});
  };

  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    add("BAD_DT", "dt must be positive and finite");
  }
  if (s.t_obs_idx < 1 || s.t_obs_idx > s.T_tot - 2) {
    add("T_OBS_OUT_OF_RANGE", "t_obs_idx must lie in [1, T_tot - 2]");
  }
  if (s.agents.empty()) {
    add("NO_AGENTS", "scenario has no agents");
  }
  if (s.n_predict() == 0 && !s.agents.empty()) {
    add("NO_PREDICT_AGENT", "no agent has to_predict = true");
  }

  std::set<std::string> agent_ids;
  for (const auto & a : s.agents) {
    if (!agent_ids.insert(a.agent_id).second) {
      add("DUPLICATE_AGENT_ID", a.agent_id);
    }
    if (!(a.length > 0.0) || !(a.width > 0.0)) {
      add("BAD_DIMENSIONS", a.agent_id);
    }
    if (a.states.size() != static_cast<std::size_t>(std::max(s.T_tot, 0))) {
      add("STATES_LENGTH_MISMATCH", a.agent_id);
    }
    if (a.valid_count() == 0) {
      add("NO_VALID_STATES", a.agent_id);
    }
    for (std::size_t t = 0; t < a.states.size(); ++t) {
      const auto & st = a.states[t];
      if (!st.valid) {
        continue;
      }
      if (!std::isfinite(st.x) || !std::isfinite(st.y) || !std::isfinite(st.heading) ||
          !std::isfinite(st.vx) || !std::isfinite(st.vy)) {
        add("NON_FINITE_STATE", a.agent_id + "@" + std::to_string(t));
      } else if (st.heading <= -std::numbers::pi || st.heading > std::numbers::pi) {
        add("HEADING_NOT_NORMALIZED", a.agent_id + "@" + std::to_string(t));
      }
    }
  }

  std::set<std::string> lane_ids;
  for (const auto & l : s.lanes) {
    if (!lane_ids.insert(l.lane_id).second) {
      add("DUPLICATE_LANE_ID", l.lane_id);
    }
  }
  for (const auto & l : s.lanes) {
    if (l.centerline.size() < 2) {
      add("SHORT_CENTERLINE", l.lane_id);
    }
    for (std::size_t i = 1; i < l.centerline.size(); ++i) {
      if (l.centerline[i] == l.centerline[i - 1]) {
        add("REPEATED_CENTERLINE_POINT", l.lane_id + "@" + std::to_string(i));
      }
    }
    if (l.speed_limit && !(*l.speed_limit > 0.0)) {
      add("NONPOSITIVE_SPEED_LIMIT", l.lane_id);
    }
    for (const auto * refs : {&l.successors, &l.predecessors}) {
      for (const auto & id : *refs) {
        if (lane_ids.count(id) == 0) {
          add("DANGLING_LANE_REFERENCE", l.lane_id + "->" + id);
        }
      }
    }
  }
  if (!std::is_sorted(s.lanes.begin(), s.lanes.end(), [](const Lane & a, const Lane & b) {
        return a.lane_id < b.lane_id;
      })) {
    add("LANES_NOT_SORTED", "lanes must be sorted by lane_id");
  }

  std::set<std::string> feature_ids;
  for (const auto & f : s.map_features) {
    if (!feature_ids.insert(f.feature_id).second) {
      add("DUPLICATE_FEATURE_ID", f.feature_id);
    }
    if (f.geometry.empty()) {
      add("EMPTY_GEOMETRY", f.feature_id);
    } else if (f.geometry.size() >= 3 && !is_simple_polygon(f.geometry)) {
      add("NON_SIMPLE_POLYGON", f.feature_id);
    }
  }
  return report;
}

TimeSplit split_history_future(const Scenario & s)
{
  const auto obs = static_cast<std::size_t>(s.t_obs_idx);
  const auto total = static_cast<std::size_t>(s.T_tot);
  return {{0, obs + 1}, {obs + 1, total}};
}

}  // namespace scenmine
