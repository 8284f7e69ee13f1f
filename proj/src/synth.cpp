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

#include "scenmine/synth.hpp"

#include "scenmine/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace scenmine
{

std::string_view to_string(SynthKind k)
{
  switch (k) {
    case SynthKind::leader_follower:
      return "leader_follower";
    case SynthKind::crossing:
      return "crossing";
    case SynthKind::cut_in:
      return "cut_in";
    case SynthKind::random_mix:
      return "random_mix";
    case SynthKind::stop_and_go:
      return "stop_and_go";
  }
  return "random_mix";
}

SynthKind synth_kind_from_string(std::string_view name)
{
  for (const auto k : {SynthKind::leader_follower, SynthKind::crossing, SynthKind::cut_in,
                       SynthKind::random_mix, SynthKind::stop_and_go}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw std::invalid_argument("unknown synth kind '" + std::string(name) + "'");
}

namespace
{
constexpr double kPi = std::numbers::pi;
constexpr double kLaneWidth = 3.5;

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi)
  {
    return lo + static_cast<int>(bounded_uniform(gen_, static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool chance(double p) { return uniform() < p; }
  std::mt19937_64 & engine() { return gen_; }

private:
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Lane make_lane(
  std::string id, Vec2 a, Vec2 b, std::optional<double> limit = std::nullopt,
  LaneType type = LaneType::surface_street)
{
  Lane l;
  l.lane_id = std::move(id);
  l.centerline = {a, b};
  l.speed_limit = limit;
  l.lane_type = type;
  return l;
}

// Headings follow the central-difference displacement; slower than 0.1 m/s keeps the
// previous heading, starting from `default_heading`.
AgentTrack make_track(
  std::string id, AgentType type, double length, double width, const std::vector<Vec2> & pos,
  double default_heading, double dt)
{
  AgentTrack tr;
  tr.agent_id = std::move(id);
  tr.agent_type = type;
  tr.length = length;
  tr.width = width;
  const std::size_t n = pos.size();
  tr.states.resize(n);
  double heading = normalize_angle(default_heading);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t a = t == 0 ? 0 : t - 1;
    const std::size_t b = std::min(t + 1, n - 1);
    const Vec2 d = pos[b] - pos[a];
    const double span = static_cast<double>(b - a) * dt;
    const Vec2 v = span > 0.0 ? d * (1.0 / span) : Vec2{};
    if (norm(v) >= 0.1) {
      heading = std::atan2(v.y, v.x);
    }
    auto & st = tr.states[t];
    st.x = pos[t].x;
    st.y = pos[t].y;
    st.heading = heading;
    st.vx = v.x;
    st.vy = v.y;
    st.valid = true;
  }
  return tr;
}

Scenario base_scenario(const SynthParams & p)
{
  Scenario s;
  s.scenario_id = p.scenario_id.empty()
                    ? std::string(to_string(p.kind)) + "_" + std::to_string(p.seed)
                    : p.scenario_id;
  s.dt = p.dt;
  s.t_obs_idx = p.t_obs_idx;
  s.T_tot = p.T_tot;
  return s;
}

double smooth_step(double x)
{
  x = std::clamp(x, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(kPi * x));
}

Scenario gen_leader_follower(const SynthParams & p)
{
  Scenario s = base_scenario(p);
  const auto & lf = p.leader_follower;
  const std::size_t n = static_cast<std::size_t>(p.T_tot);
  const double t_end = static_cast<double>(n - 1) * p.dt;
  const double length = 4.5;
  std::vector<Vec2> f(n);
  std::vector<Vec2> l(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double tau = static_cast<double>(t) * p.dt;
    f[t] = {lf.v_follower * tau, 0.0};
    l[t] = {lf.v_follower * t_end + length + lf.gap - lf.v_leader * (t_end - tau), 0.0};
  }
  s.lanes.push_back(make_lane("lane_0", {-50.0, 0.0}, {l.back().x + 100.0, 0.0}, 30.0));
  auto follower = make_track("follower", AgentType::vehicle, length, 2.0, f, 0.0, p.dt);
  follower.to_predict = true;
  s.agents.push_back(std::move(follower));
  s.agents.push_back(make_track("leader", AgentType::vehicle, length, 2.0, l, 0.0, p.dt));
  return s;
}

Scenario gen_crossing(const SynthParams & p)
{
  Scenario s = base_scenario(p);
  const auto & c = p.crossing;
  const std::size_t n = static_cast<std::size_t>(p.T_tot);
  std::vector<Vec2> a(n);
  std::vector<Vec2> b(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double tau = static_cast<double>(t) * p.dt;
    a[t] = {c.v_i * (tau - c.t_cross), 0.0};
    b[t] = {0.0, c.v_j * (tau - c.t_cross - c.arrival_offset)};
  }
  s.lanes.push_back(make_lane("lane_x", {-300.0, 0.0}, {300.0, 0.0}, 20.0));
  s.lanes.push_back(make_lane("lane_y", {0.0, -300.0}, {0.0, 300.0}, 20.0));
  auto ai = make_track("agent_i", AgentType::vehicle, 4.5, 2.0, a, 0.0, p.dt);
  ai.to_predict = true;
  s.agents.push_back(std::move(ai));
  s.agents.push_back(make_track("agent_j", AgentType::vehicle, 4.5, 2.0, b, kPi / 2.0, p.dt));
  return s;
}

Scenario gen_cut_in(const SynthParams & p)
{
  Scenario s = base_scenario(p);
  const auto & c = p.cut_in;
  const std::size_t n = static_cast<std::size_t>(p.T_tot);
  const double length = 4.5;
  std::vector<Vec2> def(n);
  std::vector<Vec2> agg(n);
  std::vector<Vec2> nb(n);
  const double ms = c.merge_start;
  const double md = c.merge_duration;
  const double dv = c.v_defensive - c.v_aggressive;
  for (std::size_t t = 0; t < n; ++t) {
    const double tau = static_cast<double>(t) * p.dt;
    double x = 0.0;
    if (tau <= ms) {
      x = c.v_defensive * tau;
    } else {
      const double u = std::min(tau - ms, md);
      x = c.v_defensive * ms + c.v_aggressive * u + 0.5 * dv * (u + md / kPi * std::sin(kPi * u / md));
      x += c.v_aggressive * std::max(tau - ms - md, 0.0);
    }
    def[t] = {x, 0.0};
    const double lateral = kLaneWidth * (1.0 - smooth_step((tau - ms) / md));
    agg[t] = {length + c.initial_gap + c.v_aggressive * tau, lateral};
    nb[t] = {-10.0 + 13.0 * tau, -kLaneWidth};
  }
  s.lanes.push_back(make_lane("lane_center", {-100.0, 0.0}, {500.0, 0.0}, 20.0));
  s.lanes.push_back(make_lane("lane_left", {-100.0, kLaneWidth}, {500.0, kLaneWidth}, 20.0));
  s.lanes.push_back(make_lane("lane_right", {-100.0, -kLaneWidth}, {500.0, -kLaneWidth}, 20.0));
  s.agents.push_back(make_track("aggressive", AgentType::vehicle, length, 2.0, agg, 0.0, p.dt));
  auto d = make_track("defensive", AgentType::vehicle, length, 2.0, def, 0.0, p.dt);
  d.to_predict = true;
  s.agents.push_back(std::move(d));
  s.agents.push_back(make_track("neighbor", AgentType::vehicle, length, 2.0, nb, 0.0, p.dt));
  return s;
}

Scenario gen_stop_and_go(const SynthParams & p)
{
  Scenario s = base_scenario(p);
  Rng rng(p.seed);
  const std::size_t n = static_cast<std::size_t>(p.T_tot);
  const int count = rng.integer(1, 4);
  s.lanes.push_back(make_lane("lane_0", {-50.0, 0.0}, {1500.0, 0.0}, 10.0));
  for (int k = 0; k < count; ++k) {
    const double v0 = rng.uniform(2.0, 6.0);
    const double amp = rng.uniform(1.0, 8.0);
    const double omega = rng.uniform(0.3, 1.5);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    std::vector<Vec2> pos(n);
    double x = 80.0 * k;
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) {
        const double tau = static_cast<double>(t) * p.dt;
        x += std::max(0.0, v0 + amp * std::sin(omega * tau + phase)) * p.dt;
      }
      pos[t] = {x, 0.0};
    }
    char id[16];
    std::snprintf(id, sizeof(id), "a%02d", k);
    auto tr = make_track(id, AgentType::vehicle, 4.5, 2.0, pos, 0.0, p.dt);
    tr.to_predict = k == 0;
    s.agents.push_back(std::move(tr));
  }
  return s;
}

// Car-following mixture on a local road layout, rotated and shifted at the end.
enum class Role { main, cross, pedestrian };

struct SimAgent
{
  Role role{Role::main};
  AgentType type{AgentType::vehicle};
  double length{4.5};
  double width{2.0};
  Vec2 origin;
  Vec2 dir{1.0, 0.0};
  double s{0.0};
  double d{0.0};
  double v{0.0};
  double d_from{0.0};
  double d_to{0.0};
  double lc_request{std::numeric_limits<double>::infinity()};
  double lc_start{std::numeric_limits<double>::infinity()};
  double lc_duration{3.0};
  double v_des{10.0};
  double a_max{2.0};
  double b_comf{2.5};
  double headway{1.4};
  double brake_start{std::numeric_limits<double>::infinity()};
  double brake_decel{0.0};
  double brake_target{0.0};
  bool distracted{false};
  bool ignores_signal{false};
  double stop_s{std::numeric_limits<double>::infinity()};  // cross vehicles: stop line
  double wait_until{0.0};
  bool released{false};
  bool walking{false};
  double walk_speed{1.2};
  bool to_predict{false};
  bool interesting{false};  // preferred when picking agents to predict
  std::size_t invalid_tail{0};
  std::vector<Vec2> pos;

  Vec2 position() const { return origin + dir * s + left_normal(dir) * d; }
  Vec2 velocity() const { return dir * v; }
  double front() const { return s + 0.5 * length; }
};

double idm_accel(
  const SimAgent & me, const std::vector<SimAgent> & all, std::size_t self, double line_gap)
{
  const Vec2 p = me.position();
  const Vec2 nrm = left_normal(me.dir);
  double gap = line_gap;
  double v_lead = 0.0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (k == self) {
      continue;
    }
    const SimAgent & o = all[k];
    const Vec2 r = o.position() - p;
    const double along = dot(r, me.dir);
    if (along <= 0.0 || along > 120.0) {
      continue;
    }
    const double c = std::abs(dot(o.dir, me.dir));
    const double sn = std::abs(cross(o.dir, me.dir));
    const double ext_along = 0.5 * (c * o.length + sn * o.width);
    const double ext_lat = 0.5 * (sn * o.length + c * o.width);
    if (std::abs(dot(r, nrm)) >= 0.5 * me.width + ext_lat + 0.3) {
      continue;
    }
    const double g = along - 0.5 * me.length - ext_along;
    if (g < gap) {
      gap = g;
      v_lead = dot(o.velocity(), me.dir);
    }
  }
  double a = me.a_max * (1.0 - std::pow(me.v / me.v_des, 4.0));
  if (std::isfinite(gap)) {
    const double s_star =
      2.0 + std::max(0.0, me.v * me.headway + me.v * (me.v - v_lead) / (2.0 * std::sqrt(me.a_max * me.b_comf)));
    const double ratio = s_star / std::max(gap, 0.1);
    a -= me.a_max * ratio * ratio;
  }
  return std::clamp(a, -9.0, me.a_max);
}

// Gap from the front bumper to a stop line at `line` along the agent's axis; infinite once
// the vehicle is past it.
double line_gap(const SimAgent & a, double line)
{
  const double g = line - a.front();
  return g < -0.5 ? std::numeric_limits<double>::infinity() : std::max(g, 0.0);
}

Scenario gen_random_mix(const SynthParams & p)
{
  Scenario s = base_scenario(p);
  Rng rng(p.seed);
  const std::size_t n = static_cast<std::size_t>(p.T_tot);
  const double t_obs = static_cast<double>(p.t_obs_idx) * p.dt;
  const double inf = std::numeric_limits<double>::infinity();
  const int max_agents = std::max(p.max_agents, 2);

  const double u_lanes = rng.uniform();
  const int n_lanes = u_lanes < 0.2 ? 1 : (u_lanes < 0.6 ? 2 : 3);
  const double limits[] = {11.1, 13.9, 16.7, 22.2};
  const double limit = limits[rng.integer(0, 3)];
  const double top_y = kLaneWidth * (n_lanes - 1);
  for (int l = 0; l < n_lanes; ++l) {
    s.lanes.push_back(make_lane(
      "main_" + std::to_string(l), {-250.0, kLaneWidth * l}, {450.0, kLaneWidth * l}, limit));
  }
  const bool cross_road = rng.chance(0.7);
  const double x_c = rng.uniform(30.0, 90.0);
  const bool cross_down = cross_road && rng.chance(0.5);
  if (cross_road) {
    s.lanes.push_back(make_lane("cross_up", {x_c, -150.0}, {x_c, 150.0}, 13.9));
    if (cross_down) {
      s.lanes.push_back(
        make_lane("cross_down", {x_c + kLaneWidth, 150.0}, {x_c + kLaneWidth, -150.0}, 13.9));
    }
  }
  const bool crosswalk = rng.chance(0.6);
  double x_p = rng.uniform(-20.0, 70.0);
  if (cross_road && std::abs(x_p - x_c) < 14.0) {
    x_p = x_c - 14.0 - rng.uniform(0.0, 20.0);
  }
  if (crosswalk) {
    s.map_features.push_back(
      {"crosswalk_0", MapFeatureKind::crosswalk,
       {{x_p - 2.0, -4.0}, {x_p + 2.0, -4.0}, {x_p + 2.0, top_y + 4.0}, {x_p - 2.0, top_y + 4.0}}});
  }
  // Signal on the main road: red from the start until `signal_release`.
  double signal_x = inf;
  double signal_release = 0.0;
  if (cross_road ? rng.chance(0.6) : rng.chance(0.35)) {
    signal_x = cross_road ? x_c - 4.75 : rng.uniform(30.0, 100.0);
    signal_release = rng.uniform(2.0, 12.0);
  }
  if (rng.chance(0.3) && (cross_road || crosswalk)) {
    const double x_stop = cross_road ? x_c - 6.0 : x_p - 4.0;
    s.map_features.push_back({"stop_0", MapFeatureKind::stop_sign, {{x_stop, -2.5}}});
  }

  std::vector<SimAgent> agents;
  std::vector<std::vector<std::size_t>> lane_queue(static_cast<std::size_t>(n_lanes));
  const int main_budget = std::min(max_agents - 1, 12);
  for (int l = 0; l < n_lanes; ++l) {
    const int count = rng.integer(1, 4);
    // With a red signal some lanes start with a standing queue at the line.
    const bool queue = std::isfinite(signal_x) && rng.chance(0.8);
    const int standing = queue ? rng.integer(1, std::min(count, 2)) : 0;
    const double s_front = queue ? signal_x - rng.uniform(0.5, 2.0) : rng.uniform(-40.0, 80.0);
    double v_front = 0.0;
    for (int k = 0; k < count && static_cast<int>(agents.size()) < main_budget; ++k) {
      SimAgent a;
      a.origin = {0.0, kLaneWidth * l};
      if (l == 0 && k == count - 1 && k > 0 && rng.chance(0.15)) {
        a.type = AgentType::cyclist;
        a.length = 1.8;
        a.width = 0.7;
        a.v_des = rng.uniform(4.0, 7.0);
      } else {
        a.length = rng.uniform(4.2, 5.2);
        a.width = rng.uniform(1.8, 2.1);
        a.v_des = limit * rng.uniform(0.7, 1.25);
      }
      a.a_max = rng.uniform(1.2, 2.5);
      a.b_comf = rng.uniform(2.0, 3.0);
      a.headway = rng.uniform(1.0, 1.8);
      a.v = k < standing ? 0.0 : a.v_des * rng.uniform(0.85, 1.05);
      if (k == 0) {
        a.s = s_front - 0.5 * a.length;
      } else {
        const auto & lead = agents[lane_queue[static_cast<std::size_t>(l)].back()];
        if (k >= standing) {
          a.v = std::max(0.0, std::min(a.v, v_front + rng.uniform(-2.0, 6.0)));
        }
        const double closing = std::max(0.0, a.v - v_front);
        const double gap = k < standing ? rng.uniform(2.0, 3.5)
                                        : 2.0 + a.v * a.headway * rng.uniform(0.8, 2.0) +
                                            closing * rng.uniform(2.0, 5.0) +
                                            (queue && k == standing ? rng.uniform(20.0, 60.0) : 0.0);
        a.s = lead.s - 0.5 * (lead.length + a.length) - gap;
      }
      a.interesting = queue && k == standing;
      v_front = a.v;
      // Too close to stop comfortably when the scene starts.
      a.ignores_signal = a.v > 0.0 && signal_x - a.front() < a.v * a.v / 6.0 + 3.0;
      if (k == 0 && !queue && rng.chance(0.15)) {
        a.brake_start = rng.uniform(0.2, 5.0);
        a.brake_decel = rng.uniform(1.5, 3.5);
        a.brake_target = rng.uniform(0.0, 0.4 * a.v);
      }
      lane_queue[static_cast<std::size_t>(l)].push_back(agents.size());
      agents.push_back(a);
    }
  }

  // A follower that stops reacting after the observation window while its leader brakes.
  if (rng.chance(0.07)) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto & q : lane_queue) {
      for (std::size_t k = 1; k < q.size(); ++k) {
        pairs.emplace_back(q[k - 1], q[k]);
      }
    }
    if (!pairs.empty()) {
      const auto [lead, f] =
        pairs[static_cast<std::size_t>(rng.integer(0, static_cast<int>(pairs.size()) - 1))];
      agents[f].distracted = true;
      agents[f].to_predict = true;
      agents[lead].brake_start = rng.uniform(1.5, 3.5);
      agents[lead].brake_decel = rng.uniform(4.0, 7.0);
      agents[lead].brake_target = rng.uniform(0.0, 2.0);
    }
  }

  if (n_lanes >= 2 && rng.chance(0.35)) {
    const std::size_t k = static_cast<std::size_t>(rng.integer(0, static_cast<int>(agents.size()) - 1));
    auto & a = agents[k];
    if (!a.distracted && a.type == AgentType::vehicle) {
      const int lane = static_cast<int>(std::lround(a.origin.y / kLaneWidth));
      const int target =
        lane == 0 ? 1 : (lane == n_lanes - 1 ? lane - 1 : lane + (rng.chance(0.5) ? 1 : -1));
      a.d_to = kLaneWidth * (target - lane);
      a.lc_request = rng.uniform(1.2, 4.0);
      a.interesting = true;
      a.lc_duration = rng.uniform(2.0, 4.0);
    }
  }

  auto add_cross = [&](double x, Vec2 dir, double y0, double stop_y) {
    SimAgent a;
    a.role = Role::cross;
    a.origin = {x, 0.0};
    a.dir = dir;
    a.s = dot(Vec2{0.0, y0}, dir);
    a.stop_s = dot(Vec2{0.0, stop_y}, dir);
    a.length = rng.uniform(4.2, 5.2);
    a.width = rng.uniform(1.8, 2.1);
    a.v_des = rng.uniform(6.0, 14.0);
    a.v = a.v_des * rng.uniform(0.7, 1.0);
    a.a_max = rng.uniform(1.2, 2.5);
    a.b_comf = rng.uniform(2.0, 3.0);
    a.headway = rng.uniform(1.0, 1.8);
    a.wait_until = rng.uniform(0.0, 3.0);
    a.interesting = true;
    if (rng.chance(0.06)) {
      a.distracted = true;
      a.released = true;
      a.to_predict = true;
    }
    agents.push_back(a);
  };
  if (cross_road) {
    const int up = rng.integer(0, 3);
    double y = rng.uniform(-80.0, -25.0);
    for (int k = 0; k < up && static_cast<int>(agents.size()) < max_agents; ++k) {
      add_cross(x_c, {0.0, 1.0}, y, -5.5);
      y -= rng.uniform(12.0, 30.0);
    }
    if (cross_down) {
      double y_down = top_y + rng.uniform(25.0, 80.0);
      const int down = rng.integer(0, 2);
      for (int k = 0; k < down && static_cast<int>(agents.size()) < max_agents; ++k) {
        add_cross(x_c + kLaneWidth, {0.0, -1.0}, y_down, top_y + 5.5);
        y_down += rng.uniform(12.0, 30.0);
      }
    }
  }
  if (crosswalk) {
    const int peds = rng.integer(0, 3);
    std::vector<double> slots = {-1.5, -0.5, 0.5, 1.5};
    for (int k = 0; k < peds && static_cast<int>(agents.size()) < max_agents; ++k) {
      const std::size_t pick =
        static_cast<std::size_t>(rng.integer(0, static_cast<int>(slots.size()) - 1));
      const double offset = slots[pick];
      slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(pick));
      SimAgent a;
      a.role = Role::pedestrian;
      a.type = AgentType::pedestrian;
      a.length = 0.8;
      a.width = 0.8;
      const bool up = offset < 0.0;
      a.dir = up ? Vec2{0.0, 1.0} : Vec2{0.0, -1.0};
      a.origin = {x_p + offset, 0.0};
      a.s = up ? -6.0 : -(top_y + 6.0);
      a.walk_speed = rng.uniform(0.9, 1.6);
      a.wait_until = rng.uniform(0.0, 5.0);
      agents.push_back(a);
    }
  }

  auto main_clear = [&](double x_lo, double x_hi, double horizon) {
    for (const auto & m : agents) {
      if (m.role != Role::main) {
        continue;
      }
      const double x = m.position().x;
      const double reach = std::max(horizon * m.v, 8.0);
      if (x + 0.5 * m.length > x_lo - reach && x - 0.5 * m.length < x_hi && (m.v > 0.5 || x + 0.5 * m.length > x_lo)) {
        return false;
      }
    }
    return true;
  };
  auto target_lane_clear = [&](const SimAgent & a) {
    const double y = a.origin.y + a.d_to;
    const double x = a.position().x;
    for (const auto & m : agents) {
      if (m.role != Role::main || &m == &a || std::abs(m.position().y - y) > 1.5) {
        continue;
      }
      const double dx = m.position().x - x;
      const double half = 0.5 * (m.length + a.length);
      if (dx >= 0.0 && dx - half < 5.0 + 0.5 * a.v) {
        return false;
      }
      if (dx < 0.0 && -dx - half < 5.0 + 1.0 * m.v) {
        return false;
      }
    }
    return true;
  };

  for (std::size_t t = 0; t < n; ++t) {
    const double tau = static_cast<double>(t) * p.dt;
    bool crossing_busy = false;
    for (auto & a : agents) {
      if (a.role == Role::main && tau >= a.lc_request && !std::isfinite(a.lc_start)) {
        if (target_lane_clear(a)) {
          a.lc_start = tau;
        } else if (tau > 6.0) {
          a.lc_request = inf;
        }
      }
      if (tau >= a.lc_start) {
        a.d = a.d_from + (a.d_to - a.d_from) * smooth_step((tau - a.lc_start) / a.lc_duration);
      }
      if (a.role == Role::pedestrian && !a.walking && tau >= a.wait_until &&
          main_clear(x_p - 2.5, x_p + 2.5, 3.0)) {
        a.walking = true;
      }
      if (a.role == Role::cross && !a.released && tau >= a.wait_until &&
          a.stop_s - a.front() < 3.0 && main_clear(x_c - 3.0, x_c + kLaneWidth + 3.0, 4.0)) {
        a.released = true;
      }
      if (a.role == Role::pedestrian && a.walking) {
        const double y = a.position().y;
        crossing_busy = crossing_busy || (y > -4.5 && y < top_y + 4.5);
      }
      a.pos.push_back(a.position());
    }
    std::vector<double> acc(agents.size(), 0.0);
    for (std::size_t k = 0; k < agents.size(); ++k) {
      auto & a = agents[k];
      if (a.role == Role::pedestrian || (a.distracted && tau >= t_obs)) {
        continue;
      }
      double gap = inf;
      if (a.role == Role::main && !a.distracted) {
        if (tau < signal_release && !a.ignores_signal) {
          gap = std::min(gap, line_gap(a, signal_x));
        }
        // Yield at the crosswalk only when a moderate stop is still possible.
        const double cw = line_gap(a, x_p - 3.0);
        if (crossing_busy && cw >= a.v * a.v / 8.0) {
          gap = std::min(gap, cw);
        }
      }
      if (a.role == Role::cross && !a.released) {
        gap = std::min(gap, line_gap(a, a.stop_s));
      }
      double x = idm_accel(a, agents, k, gap);
      if (tau >= a.brake_start) {
        x = std::min(x, a.v > a.brake_target ? -a.brake_decel : 0.0);
      }
      acc[k] = x;
    }
    for (std::size_t k = 0; k < agents.size(); ++k) {
      auto & a = agents[k];
      if (a.role == Role::pedestrian) {
        a.v = a.walking ? a.walk_speed : 0.0;
      } else {
        a.v = std::max(0.0, a.v + acc[k] * p.dt);
      }
      a.s += a.v * p.dt;
    }
  }

  // Predict flags: every distracted agent plus picks up to a target count, interesting
  // agents first.
  const int n_agents = static_cast<int>(agents.size());
  const int target = rng.integer(1, std::min(4, n_agents));
  std::vector<std::size_t> order(agents.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k] = k;
  }
  seeded_shuffle(order, rng.engine());
  std::stable_partition(order.begin(), order.end(), [&](std::size_t k) { return agents[k].interesting; });
  int predicted = static_cast<int>(
    std::count_if(agents.begin(), agents.end(), [](const auto & a) { return a.to_predict; }));
  for (const auto k : order) {
    if (predicted >= target) {
      break;
    }
    if (!agents[k].to_predict) {
      agents[k].to_predict = true;
      ++predicted;
    }
  }
  for (auto & a : agents) {
    if (!a.to_predict && rng.chance(0.1)) {
      a.invalid_tail = static_cast<std::size_t>(rng.integer(10, 40));
    }
  }

  const double theta = rng.uniform(-kPi, kPi);
  const Vec2 shift{rng.uniform(-300.0, 300.0), rng.uniform(-300.0, 300.0)};
  auto xf = [&](const Vec2 & v) { return rotate(v, theta) + shift; };
  for (auto & l : s.lanes) {
    for (auto & pt : l.centerline) {
      pt = xf(pt);
    }
  }
  for (auto & f : s.map_features) {
    for (auto & pt : f.geometry) {
      pt = xf(pt);
    }
  }
  for (std::size_t k = 0; k < agents.size(); ++k) {
    auto & a = agents[k];
    std::vector<Vec2> pts(a.pos.size());
    for (std::size_t t = 0; t < pts.size(); ++t) {
      pts[t] = xf(a.pos[t]);
    }
    char id[16];
    std::snprintf(id, sizeof(id), "a%02zu", k);
    auto tr = make_track(
      id, a.type, a.length, a.width, pts, std::atan2(a.dir.y, a.dir.x) + theta, p.dt);
    tr.to_predict = a.to_predict;
    for (std::size_t t = n - a.invalid_tail; t < n; ++t) {
      tr.states[t] = AgentState{};
    }
    s.agents.push_back(std::move(tr));
  }
  return s;
}

Scenario build(const SynthParams & p)
{
  switch (p.kind) {
    case SynthKind::leader_follower:
      return gen_leader_follower(p);
    case SynthKind::crossing:
      return gen_crossing(p);
    case SynthKind::cut_in:
      return gen_cut_in(p);
    case SynthKind::stop_and_go:
      return gen_stop_and_go(p);
    case SynthKind::random_mix:
      break;
  }
  return gen_random_mix(p);
}
}  // namespace

std::string gen_document(const SynthParams & params)
{
  if (params.T_tot < 3 || params.t_obs_idx < 1 || params.t_obs_idx > params.T_tot - 2 ||
      !(params.dt > 0.0)) {
    throw std::invalid_argument("invalid synth timebase");
  }
  Scenario s = build(params);
  std::sort(s.lanes.begin(), s.lanes.end(), [](const Lane & a, const Lane & b) {
    return a.lane_id < b.lane_id;
  });
  return serialize_scenario(s);
}

Scenario gen_scenario(const SynthParams & params)
{
  return parse_scenario(gen_document(params)).scenario;
}

SynthParams corpus_params(SynthKind kind, std::size_t k, std::uint64_t seed)
{
  SynthParams p;
  p.kind = kind;
  p.seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k)));
  char id[64];
  std::snprintf(id, sizeof(id), "%s_%06zu", std::string(to_string(kind)).c_str(), k);
  p.scenario_id = id;
  Rng rng(p.seed ^ 0x5bd1e995ULL);
  if (kind == SynthKind::leader_follower) {
    p.leader_follower.v_follower = rng.uniform(8.0, 25.0);
    p.leader_follower.v_leader = rng.uniform(0.0, p.leader_follower.v_follower - 1.0);
    p.leader_follower.gap = rng.uniform(5.0, 40.0);
  } else if (kind == SynthKind::crossing) {
    p.crossing.v_i = rng.uniform(6.0, 15.0);
    p.crossing.v_j = rng.uniform(6.0, 15.0);
    p.crossing.t_cross = rng.uniform(3.0, 6.0);
    p.crossing.arrival_offset = rng.uniform(-2.0, 2.0);
  }
  return p;
}

std::vector<Scenario> gen_corpus(SynthKind kind, std::size_t count, std::uint64_t seed)
{
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(gen_scenario(corpus_params(kind, k, seed)));
  }
  return out;
}

}  // namespace scenmine
