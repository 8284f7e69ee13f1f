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

#include "scenmine/eval_metrics.hpp"

#include "scenmine/features_interaction.hpp"
#include "scenmine/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace scenmine
{

std::vector<AgentPrediction> read_predictions_jsonl(std::istream & in)
{
  std::vector<AgentPrediction> out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> k;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const std::string where = "predictions line " + std::to_string(line_no);
    AgentPrediction p;
    try {
      const auto j = nlohmann::json::parse(line);
      p.scenario_id = j.at("scenario_id").get<std::string>();
      p.agent_id = j.at("agent_id").get<std::string>();
      for (const auto & mode : j.at("modes")) {
        std::vector<Vec2> pts;
        pts.reserve(mode.size());
        for (const auto & xy : mode) {
          if (!xy.is_array() || xy.size() != 2) {
            throw DataError(where + ": mode points must be [x, y]");
          }
          pts.push_back({xy[0].get<double>(), xy[1].get<double>()});
        }
        p.modes.push_back(std::move(pts));
      }
      p.confidences = j.at("confidences").get<std::vector<double>>();
      if (j.contains("headings")) {
        p.headings = j.at("headings").get<std::vector<std::vector<double>>>();
      }
    } catch (const nlohmann::json::exception & e) {
      throw DataError(where + ": " + e.what());
    }
    if (p.modes.empty() || p.modes.size() != p.confidences.size()) {
      throw DataError(where + ": need one confidence per mode and at least one mode");
    }
    if (!p.headings.empty()) {
      if (p.headings.size() != p.modes.size()) {
        throw DataError(where + ": need one heading list per mode");
      }
      for (std::size_t m = 0; m < p.modes.size(); ++m) {
        if (p.headings[m].size() != p.modes[m].size()) {
          throw DataError(where + ": need one heading per mode point");
        }
      }
    }
    if (k && *k != p.modes.size()) {
      throw DataError(where + ": mode count differs from earlier records");
    }
    k = p.modes.size();
    double sum = 0.0;
    for (const double c : p.confidences) {
      if (!(c >= 0.0)) {
        throw DataError(where + ": negative confidence");
      }
      sum += c;
    }
    if (sum > 1.0 + 1e-6) {
      throw DataError(where + ": confidences sum above 1");
    }
    for (const auto & m : p.modes) {
      if (m.size() != p.modes.front().size()) {
        throw DataError(where + ": modes differ in length");
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_predictions_jsonl(std::ostream & out, const std::vector<AgentPrediction> & preds)
{
  for (const auto & p : preds) {
    nlohmann::ordered_json j;
    j["scenario_id"] = p.scenario_id;
    j["agent_id"] = p.agent_id;
    auto modes = nlohmann::ordered_json::array();
    for (const auto & m : p.modes) {
      auto pts = nlohmann::ordered_json::array();
      for (const auto & v : m) {
        pts.push_back({v.x, v.y});
      }
      modes.push_back(std::move(pts));
    }
    j["modes"] = std::move(modes);
    j["confidences"] = p.confidences;
    if (!p.headings.empty()) {
      j["headings"] = p.headings;
    }
    out << j.dump() << '\n';
  }
}

std::vector<AgentPrediction> ground_truth_predictions(const Scenario & s)
{
  const TimeSplit split = split_history_future(s);
  std::vector<AgentPrediction> out;
  for (const auto & a : s.agents) {
    if (!a.to_predict) {
      continue;
    }
    AgentPrediction p;
    p.scenario_id = s.scenario_id;
    p.agent_id = a.agent_id;
    std::vector<Vec2> mode;
    std::vector<double> heading;
    std::optional<AgentState> last;
    for (std::size_t t = 0; t < split.future.end; ++t) {
      if (a.states[t].valid) {
        last = a.states[t];
      }
      if (split.future.contains(t)) {
        mode.push_back(last ? last->position() : Vec2{});
        heading.push_back(last ? last->heading : 0.0);
      }
    }
    p.modes.push_back(std::move(mode));
    p.headings.push_back(std::move(heading));
    p.confidences.push_back(1.0);
    out.push_back(std::move(p));
  }
  return out;
}

namespace
{
std::span<const double> mode_headings(const AgentPrediction & p, std::size_t m)
{
  return m < p.headings.size() ? std::span<const double>(p.headings[m]) : std::span<const double>{};
}

struct ModeErrors
{
  double ade{0.0};
  double fde{0.0};
  bool any{false};
};

ModeErrors mode_errors(const std::vector<Vec2> & mode, std::span<const AgentState> gt_future)
{
  ModeErrors e;
  double sum = 0.0;
  std::size_t count = 0;
  const std::size_t n = std::min(mode.size(), gt_future.size());
  for (std::size_t t = 0; t < n; ++t) {
    if (!gt_future[t].valid) {
      continue;
    }
    const double d = distance(mode[t], gt_future[t].position());
    sum += d;
    ++count;
    e.fde = d;
  }
  e.any = count > 0;
  e.ade = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return e;
}
}  // namespace

std::optional<AdeFde> min_ade_fde(
  const AgentPrediction & pred, std::span<const AgentState> gt_future)
{
  AdeFde best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto & mode : pred.modes) {
    const auto e = mode_errors(mode, gt_future);
    if (!e.any) {
      return std::nullopt;
    }
    best.min_ade = std::min(best.min_ade, e.ade);
    best.min_fde = std::min(best.min_fde, e.fde);
  }
  return best;
}

std::size_t top_confidence_mode(const AgentPrediction & pred)
{
  std::size_t best = 0;
  for (std::size_t m = 1; m < pred.confidences.size(); ++m) {
    if (pred.confidences[m] > pred.confidences[best]) {
      best = m;
    }
  }
  return best;
}

std::size_t best_ade_mode(const AgentPrediction & pred, std::span<const AgentState> gt_future)
{
  std::size_t best = 0;
  double best_ade = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < pred.modes.size(); ++m) {
    const double ade = mode_errors(pred.modes[m], gt_future).ade;
    if (ade < best_ade) {
      best_ade = ade;
      best = m;
    }
  }
  return best;
}

std::vector<AgentState> mode_track(
  const Scenario & s, std::size_t agent, const std::vector<Vec2> & mode,
  std::span<const double> headings)
{
  const AgentTrack & track = s.agents[agent];
  const TimeSplit split = split_history_future(s);
  std::vector<AgentState> out(track.states.begin(), track.states.end());
  std::optional<Vec2> prev_pos;
  double prev_heading = 0.0;
  for (std::size_t t = split.history.begin; t < split.history.end; ++t) {
    if (track.states[t].valid) {
      prev_pos = track.states[t].position();
      prev_heading = track.states[t].heading;
    }
  }
  for (std::size_t t = split.future.begin; t < split.future.end; ++t) {
    const std::size_t k = t - split.future.begin;
    if (k >= mode.size()) {
      out[t] = AgentState{};
      continue;
    }
    const Vec2 p = mode[k];
    AgentState st;
    st.x = p.x;
    st.y = p.y;
    st.heading = prev_heading;
    if (prev_pos) {
      const Vec2 d = p - *prev_pos;
      if (norm(d) >= 0.1) {
        st.heading = std::atan2(d.y, d.x);
      }
      st.vx = d.x / s.dt;
      st.vy = d.y / s.dt;
    }
    if (k < headings.size()) {
      st.heading = headings[k];
    }
    st.valid = track.states[t].valid;
    prev_pos = p;
    prev_heading = st.heading;
    out[t] = st;
  }
  return out;
}

int mode_collisions(
  const Scenario & s, std::size_t agent, const std::vector<Vec2> & mode,
  std::span<const double> headings)
{
  const TimeSplit split = split_history_future(s);
  const auto states = mode_track(s, agent, mode, headings);
  const TrackView mine{states, s.agents[agent].length, s.agents[agent].width, {}};
  int count = 0;
  for (std::size_t j = 0; j < s.agents.size(); ++j) {
    if (j == agent) {
      continue;
    }
    if (detect_collisions(mine, make_view(s.agents[j]), split.future).collision_count > 0) {
      ++count;
    }
  }
  return count;
}

std::size_t min_collision_mode(const AgentPrediction & pred, const Scenario & s, std::size_t agent)
{
  std::size_t best = 0;
  int best_count = std::numeric_limits<int>::max();
  for (std::size_t m = 0; m < pred.modes.size(); ++m) {
    const int c = mode_collisions(s, agent, pred.modes[m], mode_headings(pred, m));
    if (c < best_count || (c == best_count && pred.confidences[m] > pred.confidences[best])) {
      best = m;
      best_count = c;
    }
  }
  return best;
}

std::string_view to_string(TrajectoryBucket b)
{
  switch (b) {
    case TrajectoryBucket::stationary:
      return "stationary";
    case TrajectoryBucket::straight:
      return "straight";
    case TrajectoryBucket::straight_left:
      return "straight_left";
    case TrajectoryBucket::straight_right:
      return "straight_right";
    case TrajectoryBucket::left:
      return "left";
    case TrajectoryBucket::right:
      return "right";
    case TrajectoryBucket::left_u_turn:
      return "left_u_turn";
    case TrajectoryBucket::right_u_turn:
      return "right_u_turn";
  }
  return "straight";
}

TrajectoryBucket classify_trajectory(const AgentState & start, const AgentState & end)
{
  constexpr double pi = std::numbers::pi;
  if (distance(start.position(), end.position()) < 2.0) {
    return TrajectoryBucket::stationary;
  }
  const double dh = normalize_angle(end.heading - start.heading);
  const double a = std::abs(dh);
  const bool left = dh > 0.0;
  if (a > 3.0 * pi / 4.0) {
    return left ? TrajectoryBucket::left_u_turn : TrajectoryBucket::right_u_turn;
  }
  if (a > pi / 6.0) {
    return left ? TrajectoryBucket::left : TrajectoryBucket::right;
  }
  if (a > pi / 12.0) {
    return left ? TrajectoryBucket::straight_left : TrajectoryBucket::straight_right;
  }
  return TrajectoryBucket::straight;
}

std::optional<AgentMapRecord> map_record(
  const AgentPrediction & pred, const AgentState & last_history,
  std::span<const AgentState> gt_future)
{
  std::optional<std::size_t> last;
  double path = 0.0;
  Vec2 prev = last_history.position();
  for (std::size_t t = 0; t < gt_future.size(); ++t) {
    if (gt_future[t].valid) {
      path += distance(prev, gt_future[t].position());
      prev = gt_future[t].position();
      last = t;
    }
  }
  if (!last) {
    return std::nullopt;
  }
  AgentMapRecord rec;
  rec.bucket = classify_trajectory(last_history, gt_future[*last]);
  const double threshold = std::max(2.0, 0.05 * path);
  std::optional<std::size_t> tp;
  std::vector<bool> hit(pred.modes.size(), false);
  for (std::size_t m = 0; m < pred.modes.size(); ++m) {
    if (*last < pred.modes[m].size()) {
      hit[m] = distance(pred.modes[m][*last], gt_future[*last].position()) < threshold;
    }
    if (hit[m] && (!tp || pred.confidences[m] > pred.confidences[*tp])) {
      tp = m;
    }
  }
  for (std::size_t m = 0; m < pred.modes.size(); ++m) {
    rec.detections.emplace_back(pred.confidences[m], tp && *tp == m);
  }
  return rec;
}

double average_precision(std::vector<std::pair<double, bool>> detections, std::size_t n_positive)
{
  if (n_positive == 0) {
    return 0.0;
  }
  std::stable_sort(detections.begin(), detections.end(), [](const auto & a, const auto & b) {
    if (a.first != b.first) {
      return a.first > b.first;
    }
    return !a.second && b.second;
  });
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < detections.size(); ++k) {
    tp += detections[k].second ? 1 : 0;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(n_positive));
  }
  double ap = 0.0;
  for (int r = 0; r <= 10; ++r) {
    const double level = r / 10.0;
    double best = 0.0;
    for (std::size_t k = 0; k < precision.size(); ++k) {
      if (recall[k] >= level - 1e-12) {
        best = std::max(best, precision[k]);
      }
    }
    ap += best;
  }
  return ap / 11.0;
}

double map_metric(std::span<const AgentMapRecord> records)
{
  std::array<std::vector<std::pair<double, bool>>, kNumBuckets> det;
  std::array<std::size_t, kNumBuckets> positives{};
  for (const auto & r : records) {
    const auto b = static_cast<std::size_t>(r.bucket);
    ++positives[b];
    det[b].insert(det[b].end(), r.detections.begin(), r.detections.end());
  }
  double sum = 0.0;
  std::size_t buckets = 0;
  for (std::size_t b = 0; b < kNumBuckets; ++b) {
    if (positives[b] == 0) {
      continue;
    }
    sum += average_precision(det[b], positives[b]);
    ++buckets;
  }
  return buckets == 0 ? 0.0 : sum / static_cast<double>(buckets);
}

namespace
{
struct ClassAccumulator
{
  std::size_t agents{0};
  std::size_t skipped{0};
  double ade{0.0};
  double fde{0.0};
  std::size_t collisions{0};
  std::vector<AgentMapRecord> map_records;

  ClassMetrics finish() const
  {
    ClassMetrics m;
    m.n_agents = agents;
    m.n_skipped = skipped;
    const double n = static_cast<double>(agents);
    if (agents > 0) {
      m.min_ade = ade / n;
      m.min_fde = fde / n;
      m.collision_rate = static_cast<double>(collisions) / n;
      m.map = map_metric(map_records);
    }
    return m;
  }
};

std::string pred_key(const std::string & scenario_id, const std::string & agent_id)
{
  return scenario_id + '\x1f' + agent_id;
}

const char * kClassNames[3] = {"vehicle", "pedestrian", "cyclist"};
}  // namespace

EvalReport evaluate(
  const std::vector<Scenario> & scenarios, const std::vector<AgentPrediction> & preds,
  CollisionModeRule rule, const std::unordered_set<std::string> * ids)
{
  std::unordered_map<std::string, const AgentPrediction *> by_key;
  for (const auto & p : preds) {
    by_key[pred_key(p.scenario_id, p.agent_id)] = &p;
  }
  std::array<ClassAccumulator, 3> acc;
  std::vector<std::string> missing;
  EvalReport report;
  for (const auto & s : scenarios) {
    if (ids != nullptr && ids->count(s.scenario_id) == 0) {
      continue;
    }
    ++report.n_scenarios;
    const TimeSplit split = split_history_future(s);
    for (std::size_t a = 0; a < s.agents.size(); ++a) {
      const AgentTrack & track = s.agents[a];
      if (!track.to_predict) {
        continue;
      }
      const auto it = by_key.find(pred_key(s.scenario_id, track.agent_id));
      if (it == by_key.end()) {
        missing.push_back(s.scenario_id + "/" + track.agent_id);
        continue;
      }
      const AgentPrediction & pred = *it->second;
      for (const auto & m : pred.modes) {
        if (m.size() != split.future.size()) {
          throw DataError(
            "prediction for " + s.scenario_id + "/" + track.agent_id +
            " does not match the future length");
        }
      }
      auto & c = acc[static_cast<std::size_t>(track.agent_type)];
      const auto future = view(track, split.future);
      const auto errors = min_ade_fde(pred, future);
      if (!errors) {
        ++c.skipped;
        continue;
      }
      ++c.agents;
      c.ade += errors->min_ade;
      c.fde += errors->min_fde;
      const std::size_t mode =
        rule == CollisionModeRule::top_confidence ? top_confidence_mode(pred) : best_ade_mode(pred, future);
      c.collisions += static_cast<std::size_t>(mode_collisions(s, a, pred.modes[mode], mode_headings(pred, mode)));
      AgentState start;
      for (std::size_t t = split.history.begin; t < split.history.end; ++t) {
        if (track.states[t].valid) {
          start = track.states[t];
        }
      }
      if (start.valid) {
        if (auto rec = map_record(pred, start, future)) {
          c.map_records.push_back(std::move(*rec));
        }
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing predictions for";
    for (const auto & m : missing) {
      msg += ' ' + m;
    }
    throw DataError(msg);
  }
  std::size_t classes = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    report.per_class[k] = acc[k].finish();
    if (report.per_class[k].n_agents == 0) {
      continue;
    }
    ++classes;
    auto & o = report.overall;
    o.min_ade += report.per_class[k].min_ade;
    o.min_fde += report.per_class[k].min_fde;
    o.collision_rate += report.per_class[k].collision_rate;
    o.map += report.per_class[k].map;
  }
  auto & o = report.overall;
  for (const auto & c : report.per_class) {
    o.n_agents += c.n_agents;
    o.n_skipped += c.n_skipped;
  }
  if (classes > 0) {
    const double n = static_cast<double>(classes);
    o.min_ade /= n;
    o.min_fde /= n;
    o.collision_rate /= n;
    o.map /= n;
  }
  return report;
}

namespace
{
nlohmann::ordered_json metrics_json(const ClassMetrics & m)
{
  nlohmann::ordered_json j;
  j["n_agents"] = m.n_agents;
  j["n_skipped"] = m.n_skipped;
  j["min_ade"] = m.min_ade;
  j["min_fde"] = m.min_fde;
  j["collision_rate"] = m.collision_rate;
  j["map"] = m.map;
  return j;
}
}  // namespace

std::string EvalReport::to_json() const
{
  nlohmann::ordered_json j;
  j["n_scenarios"] = n_scenarios;
  j["overall"] = metrics_json(overall);
  nlohmann::ordered_json classes;
  for (std::size_t k = 0; k < 3; ++k) {
    classes[kClassNames[k]] = metrics_json(per_class[k]);
  }
  j["per_class"] = std::move(classes);
  return j.dump(2);
}

std::string EvalReport::to_table() const
{
  std::ostringstream ss;
  ss << std::left << std::setw(12) << "class" << std::right << std::setw(8) << "agents"
     << std::setw(10) << "minADE" << std::setw(10) << "minFDE" << std::setw(10) << "CR"
     << std::setw(10) << "mAP" << '\n';
  auto row = [&ss](const char * name, const ClassMetrics & m) {
    ss << std::left << std::setw(12) << name << std::right << std::setw(8) << m.n_agents
       << std::fixed << std::setprecision(4) << std::setw(10) << m.min_ade << std::setw(10)
       << m.min_fde << std::setw(10) << m.collision_rate << std::setw(10) << m.map << '\n';
  };
  for (std::size_t k = 0; k < 3; ++k) {
    row(kClassNames[k], per_class[k]);
  }
  row("overall", overall);
  return ss.str();
}

CollisionTally ground_truth_collisions(const Scenario & s)
{
  CollisionTally tally;
  const auto preds = ground_truth_predictions(s);
  std::size_t k = 0;
  for (std::size_t a = 0; a < s.agents.size(); ++a) {
    if (!s.agents[a].to_predict) {
      continue;
    }
    tally.collisions += static_cast<std::size_t>(mode_collisions(s, a, preds[k].modes[0], preds[k].headings[0]));
    ++tally.agents;
    ++k;
  }
  return tally;
}

std::vector<LossWeightRow> loss_weights(
  const std::string & scenario_id, std::span<const TrajectoryScoreSet> scores, double scale)
{
  std::vector<LossWeightRow> out;
  out.reserve(scores.size());
  for (const auto & s : scores) {
    out.push_back({scenario_id, s.agent_id, 1.0 + scale * s.score_ac, s.score_fe});
  }
  return out;
}

void write_loss_weights_csv(std::ostream & out, const std::vector<LossWeightRow> & rows)
{
  out << "scenario_id,agent_id,weight,score_fe\n";
  for (const auto & r : rows) {
    out << r.scenario_id << ',' << r.agent_id << ',' << format_number(r.weight) << ','
        << format_number(r.score_fe) << '\n';
  }
}

}  // namespace scenmine
