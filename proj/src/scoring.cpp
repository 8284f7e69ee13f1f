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

#include "scenmine/scoring.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scenmine
{

std::string_view to_string(Orientation o)
{
  switch (o) {
    case Orientation::identity:
      return "identity";
    case Orientation::inverse:
      return "inverse";
    case Orientation::negate:
      return "negate";
  }
  return "identity";
}

std::string_view to_string(ScoreVariant v)
{
  switch (v) {
    case ScoreVariant::gt:
      return "gt";
    case ScoreVariant::fe:
      return "fe";
    case ScoreVariant::combined:
      return "combined";
    case ScoreVariant::asymmetric:
      return "asymmetric";
    case ScoreVariant::asymmetric_combined:
      return "asymmetric_combined";
  }
  return "gt";
}

double variant_value(const TrajectoryScoreSet & s, ScoreVariant v)
{
  switch (v) {
    case ScoreVariant::gt:
      return s.score_gt;
    case ScoreVariant::fe:
      return s.score_fe;
    case ScoreVariant::combined:
      return s.combined();
    case ScoreVariant::asymmetric:
      return s.score_as;
    case ScoreVariant::asymmetric_combined:
      return s.score_ac;
  }
  return s.score_ac;
}

double FeatureScale::orient(double raw, double epsilon) const
{
  switch (orientation) {
    case Orientation::inverse:
      return std::isinf(raw) ? 0.0 : 1.0 / (raw + epsilon);
    case Orientation::negate:
      return 1.0 - raw;
    case Orientation::identity:
      break;
  }
  return raw;
}

double FeatureScale::apply(double raw, double epsilon) const
{
  if (constant) {
    return 0.5;
  }
  const double v = (orient(raw, epsilon) - lo) / (hi - lo);
  return std::clamp(v, 0.0, 1.0);
}

FeatureNormalizer::FeatureNormalizer()
{
  for (std::size_t f = 0; f < kNumIndividual; ++f) {
    ind_[f].name = IndividualFeatures::kNames[f];
  }
  ind_[5].orientation = Orientation::negate;
  for (std::size_t f = 0; f < kNumInteraction; ++f) {
    int_[f].name = InteractionFeatures::kNames[f];
  }
  int_[0].orientation = Orientation::inverse;
  int_[1].orientation = Orientation::inverse;
  int_[3].orientation = Orientation::inverse;
  int_[4].orientation = Orientation::inverse;
}

double sorted_quantile(std::span<const double> sorted, double q)
{
  if (sorted.empty()) {
    throw std::invalid_argument("quantile of an empty sample");
  }
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) {
    return sorted.back();
  }
  const double w = pos - static_cast<double>(i);
  return sorted[i] + w * (sorted[i + 1] - sorted[i]);
}

namespace
{
void fit_scale(
  FeatureScale & scale, std::vector<double> & values, double epsilon, double q_low,
  double q_high, double min_span, std::vector<std::string> & warnings)
{
  for (auto & v : values) {
    v = scale.orient(v, epsilon);
  }
  std::sort(values.begin(), values.end());
  scale.lo = sorted_quantile(values, q_low);
  scale.hi = sorted_quantile(values, q_high);
  scale.constant = false;
  if (scale.hi <= scale.lo) {
    const auto next = std::upper_bound(values.begin(), values.end(), scale.lo);
    if (next != values.end()) {
      scale.hi = *next;
    }
  }
  if (scale.hi > scale.lo) {
    scale.hi = std::max(scale.hi, scale.lo + min_span);
    return;
  }
  scale.constant = true;
  scale.hi = scale.lo;
  warnings.push_back("feature " + scale.name + " is constant over the corpus; normalized to 0.5");
}
}  // namespace

FeatureNormalizer FeatureNormalizer::fit(
  std::span<const IndividualVector> individual, std::span<const InteractionVector> interaction,
  double epsilon, double q_low, double q_high, double min_span)
{
  if (individual.empty()) {
    throw std::invalid_argument("cannot fit a normalizer on an empty corpus");
  }
  FeatureNormalizer n;
  n.epsilon_ = epsilon;
  std::vector<double> values;
  for (std::size_t f = 0; f < kNumIndividual; ++f) {
    values.clear();
    for (const auto & row : individual) {
      values.push_back(row[f]);
    }
    fit_scale(n.ind_[f], values, epsilon, q_low, q_high, min_span, n.warnings_);
  }
  for (std::size_t f = 0; f < kNumInteraction; ++f) {
    values.clear();
    for (const auto & row : interaction) {
      values.push_back(row[f]);
    }
    if (values.empty()) {
      n.int_[f].constant = true;
      n.warnings_.push_back("no interaction rows; feature " + n.int_[f].name + " set to 0.5");
      continue;
    }
    fit_scale(n.int_[f], values, epsilon, q_low, q_high, min_span, n.warnings_);
  }
  return n;
}

IndividualVector FeatureNormalizer::normalize(const IndividualVector & raw) const
{
  IndividualVector out{};
  for (std::size_t f = 0; f < kNumIndividual; ++f) {
    out[f] = ind_[f].apply(raw[f], epsilon_);
  }
  return out;
}

InteractionVector FeatureNormalizer::normalize(const InteractionVector & raw) const
{
  InteractionVector out{};
  for (std::size_t f = 0; f < kNumInteraction; ++f) {
    out[f] = int_[f].apply(raw[f], epsilon_);
  }
  return out;
}

namespace
{
template <std::size_t N>
nlohmann::ordered_json scales_to_json(const std::array<FeatureScale, N> & scales)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto & s : scales) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["orientation"] = std::string(to_string(s.orientation));
    j["lo"] = s.lo;
    j["hi"] = s.hi;
    j["constant"] = s.constant;
    arr.push_back(std::move(j));
  }
  return arr;
}

template <std::size_t N>
void scales_from_json(const nlohmann::json & arr, std::array<FeatureScale, N> & scales)
{
  if (!arr.is_array() || arr.size() != N) {
    throw std::invalid_argument("normalizer feature count mismatch");
  }
  for (std::size_t f = 0; f < N; ++f) {
    const auto & j = arr[f];
    if (j.at("name").get<std::string>() != scales[f].name) {
      throw std::invalid_argument("normalizer feature order mismatch at " + scales[f].name);
    }
    scales[f].lo = j.at("lo").get<double>();
    scales[f].hi = j.at("hi").get<double>();
    scales[f].constant = j.at("constant").get<bool>();
  }
}
}  // namespace

std::string FeatureNormalizer::to_json() const
{
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["epsilon"] = epsilon_;
  j["individual"] = scales_to_json(ind_);
  j["interaction"] = scales_to_json(int_);
  return j.dump(2);
}

FeatureNormalizer FeatureNormalizer::from_json(const std::string & text)
{
  const auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1) {
    throw std::invalid_argument("unsupported normalizer version");
  }
  FeatureNormalizer n;
  n.epsilon_ = j.at("epsilon").get<double>();
  scales_from_json(j.at("individual"), n.ind_);
  scales_from_json(j.at("interaction"), n.int_);
  return n;
}

double individual_score(const IndividualVector & normalized, const ScoreWeights & w)
{
  double s = 0.0;
  for (std::size_t f = 0; f < kNumIndividual; ++f) {
    s += w.individual[f] * normalized[f];
  }
  return s;
}

double interaction_score(const InteractionVector & normalized, const ScoreWeights & w)
{
  double s = 0.0;
  for (std::size_t f = 0; f < kNumInteraction; ++f) {
    s += w.interaction[f] * normalized[f];
  }
  return s;
}

double trajectory_score(
  const IndividualVector & individual, std::span<const InteractionVector> pairs,
  const FeatureNormalizer & norm, const ScoreWeights & w)
{
  double s = individual_score(norm.normalize(individual), w);
  for (const auto & p : pairs) {
    s += interaction_score(norm.normalize(p), w);
  }
  return s;
}

std::vector<std::size_t> reference_chain(
  const LaneSequence & seq, const MapIndex & map, double chain_gap)
{
  std::vector<std::size_t> chain;
  for (auto it = seq.lane_ids.rbegin(); it != seq.lane_ids.rend(); ++it) {
    const auto idx = map.find(*it);
    if (!idx) {
      break;
    }
    if (!chain.empty()) {
      const Vec2 end = map.lane(*idx).centerline.points().back();
      const Vec2 start = map.lane(chain.back()).centerline.points().front();
      if (distance(end, start) > chain_gap) {
        break;
      }
    }
    chain.push_back(*idx);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::vector<AgentState> future_extrapolate(
  const AgentTrack & track, const LaneSequence & hist_seq, const MapIndex & map, double dt,
  int t_obs_idx, int T_tot, const ExtrapolationParams & params)
{
  const auto t_obs = static_cast<std::size_t>(t_obs_idx);
  const auto total = static_cast<std::size_t>(T_tot);
  std::vector<AgentState> out(track.states.begin(), track.states.end());
  out.resize(total);

  std::vector<std::size_t> valid;
  for (std::size_t t = 0; t <= t_obs && t < track.states.size(); ++t) {
    if (track.states[t].valid) {
      valid.push_back(t);
    }
  }
  for (std::size_t t = t_obs + 1; t < total; ++t) {
    out[t] = AgentState{};
  }
  if (valid.empty()) {
    return out;
  }

  const std::size_t t_last = valid.back();
  const AgentState & last = track.states[t_last];
  if (valid.size() < 2) {
    for (std::size_t t = t_obs + 1; t < total; ++t) {
      out[t] = last;
      out[t].vx = 0.0;
      out[t].vy = 0.0;
    }
    return out;
  }
  const std::size_t intervals =
    std::min(static_cast<std::size_t>(std::max(params.window, 1)), valid.size() - 1);
  const std::size_t t_first = valid[valid.size() - 1 - intervals];
  const double span_s = static_cast<double>(t_last - t_first) * dt;

  const auto chain = hist_seq.assigned ? reference_chain(hist_seq, map, params.chain_gap)
                                       : std::vector<std::size_t>{};
  if (!chain.empty()) {
    std::vector<const std::vector<Vec2> *> parts;
    for (const auto idx : chain) {
      parts.push_back(&map.lane(idx).centerline.points());
    }
    const Polyline ref = concatenate_centerlines(parts);
    const Projection p_first = project_to_polyline(track.states[t_first].position(), ref);
    const Projection p_last = project_to_polyline(last.position(), ref);
    const double s_last = p_last.s + p_last.overshoot;
    const double s_dot = (s_last - (p_first.s + p_first.overshoot)) / span_s;
    for (std::size_t t = t_obs + 1; t < total; ++t) {
      const double es = s_last + s_dot * static_cast<double>(t - t_last) * dt;
      FrenetState f;
      f.s = std::clamp(es, 0.0, ref.length());
      f.overshoot = es - f.s;
      f.d = p_last.d;
      f.valid = true;
      out[t] = frenet_decode_one(f, ref);
      const Vec2 v = unit_from_heading(out[t].heading) * s_dot;
      out[t].vx = v.x;
      out[t].vy = v.y;
    }
    return out;
  }

  const Vec2 vel = (last.position() - track.states[t_first].position()) * (1.0 / span_s);
  for (std::size_t t = t_obs + 1; t < total; ++t) {
    const Vec2 p = last.position() + vel * (static_cast<double>(t - t_last) * dt);
    out[t] = last;
    out[t].x = p.x;
    out[t].y = p.y;
    out[t].vx = vel.x;
    out[t].vy = vel.y;
  }
  return out;
}

double proximity_weight(double min_distance_to_predict)
{
  if (std::isinf(min_distance_to_predict)) {
    return 0.0;
  }
  return 1.0 / (1.0 + min_distance_to_predict);
}

double scene_value(
  std::span<const double> agent_scores, std::span<const double> weights, std::size_t n_predict)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < agent_scores.size(); ++i) {
    sum += weights[i] * agent_scores[i];
  }
  const double n = static_cast<double>(agent_scores.size());
  const double p = static_cast<double>(n_predict);
  return sum / (p + std::sqrt(std::max(n - p, 0.0)));
}

std::vector<double> min_distance_to_predict(const Scenario & s)
{
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> out(s.agents.size(), inf);
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (s.agents[i].to_predict) {
      out[i] = 0.0;
      continue;
    }
    double best2 = inf;
    for (const auto & p : s.agents) {
      if (!p.to_predict) {
        continue;
      }
      const std::size_t n = std::min(p.states.size(), s.agents[i].states.size());
      for (std::size_t t = 0; t < n; ++t) {
        const auto & a = s.agents[i].states[t];
        const auto & b = p.states[t];
        if (a.valid && b.valid) {
          const Vec2 d = a.position() - b.position();
          best2 = std::min(best2, dot(d, d));
        }
      }
    }
    out[i] = std::sqrt(best2);
  }
  return out;
}

}  // namespace scenmine
