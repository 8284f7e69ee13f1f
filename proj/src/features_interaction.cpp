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

#include "scenmine/features_interaction.hpp"

#include "scenmine/features_individual.hpp"

#include <algorithm>
#include <cmath>

namespace scenmine
{

std::array<double, 6> InteractionFeatures::values() const
{
  return {min_thw, min_ttc, max_drac, min_delta_mttcp_traj, min_delta_mttcp_map,
          collision_count};
}

InteractionFeatures InteractionFeatures::from_values(const std::array<double, 6> & v)
{
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

std::vector<AgentPair> find_interaction_pairs(const Scenario & s, double gate_distance)
{
  std::vector<std::size_t> order(s.agents.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k] = k;
  }
  std::sort(order.begin(), order.end(), [&s](std::size_t a, std::size_t b) {
    return s.agents[a].agent_id < s.agents[b].agent_id;
  });

  // Per-agent bounding boxes give a cheap lower bound on the co-valid distance.
  std::vector<AxisBox> boxes(s.agents.size());
  for (std::size_t k = 0; k < s.agents.size(); ++k) {
    for (const auto & st : s.agents[k].states) {
      if (st.valid) {
        boxes[k].extend(st.position());
      }
    }
  }

  const double gate2 = gate_distance * gate_distance;
  std::vector<AgentPair> pairs;
  for (std::size_t x = 0; x < order.size(); ++x) {
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const auto & a = s.agents[order[x]];
      const auto & b = s.agents[order[y]];
      if (!boxes[order[x]].inflated(gate_distance).overlaps(boxes[order[y]])) {
        continue;
      }
      const std::size_t n = std::min(a.states.size(), b.states.size());
      for (std::size_t t = 0; t < n; ++t) {
        if (!a.states[t].valid || !b.states[t].valid) {
          continue;
        }
        const Vec2 d = a.states[t].position() - b.states[t].position();
        if (dot(d, d) <= gate2) {
          pairs.push_back({order[x], order[y]});
          break;
        }
      }
    }
  }
  return pairs;
}

namespace
{
std::vector<std::optional<double>> speeds_of(const TrackView & v, double dt)
{
  if (!v.speed.empty()) {
    return {v.speed.begin(), v.speed.end()};
  }
  return kinematic_profile(v.states, dt).speed;
}

std::vector<LeaderFollowerStep> follower_steps(
  const TrackView & follower, const std::vector<std::optional<double>> & vf,
  const TrackView & leader, const std::vector<std::optional<double>> & vl,
  const InteractionParams & params)
{
  const std::size_t n = std::min(follower.states.size(), leader.states.size());
  std::vector<LeaderFollowerStep> out(n);
  const double cos_cone = std::cos(params.cone_half_angle);
  const double cos_heading = std::cos(params.max_heading_difference);
  const double half_lengths = 0.5 * (follower.length + leader.length);
  for (std::size_t t = 0; t < n; ++t) {
    const auto & f = follower.states[t];
    const auto & l = leader.states[t];
    if (!f.valid || !l.valid || !vf[t] || !vl[t]) {
      continue;
    }
    const Vec2 los = l.position() - f.position();
    const double dist = norm(los);
    if (dist > params.gate_distance || dist <= 0.0) {
      continue;
    }
    if (dot(los, unit_from_heading(f.heading)) < cos_cone * dist) {
      continue;
    }
    if (std::cos(l.heading - f.heading) < cos_heading) {
      continue;
    }
    auto & step = out[t];
    step.relation = true;
    step.gap = std::max(dist - half_lengths, params.min_gap);
    step.v_follower = *vf[t];
    step.v_leader = *vl[t];
    if (step.v_follower > params.min_follower_speed) {
      step.thw = step.gap / step.v_follower;
    }
    constexpr double kClosingSlack = 1e-9;  // m/s, below finite-difference resolution
    if (step.v_follower > step.v_leader + kClosingSlack) {
      const double closing = step.v_follower - step.v_leader;
      step.ttc = step.gap / closing;
      step.drac = closing * closing / (2.0 * step.gap);
    }
  }
  return out;
}

struct PathPoint
{
  Vec2 p;
  std::size_t t;
};

std::vector<PathPoint> valid_path(const TrackView & v)
{
  std::vector<PathPoint> out;
  for (std::size_t t = 0; t < v.states.size(); ++t) {
    if (v.states[t].valid) {
      out.push_back({v.states[t].position(), t});
    }
  }
  return out;
}

constexpr std::size_t kChunk = 8;

std::vector<AxisBox> chunk_boxes(const std::vector<PathPoint> & path)
{
  std::vector<AxisBox> boxes;
  if (path.size() < 2) {
    return boxes;
  }
  const std::size_t n_seg = path.size() - 1;
  for (std::size_t c = 0; c * kChunk < n_seg; ++c) {
    AxisBox box;
    const std::size_t end = std::min(n_seg, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k <= end; ++k) {
      box.extend(path[k].p);
    }
    boxes.push_back(box);
  }
  return boxes;
}

std::optional<double> first_reach(
  const std::vector<PathPoint> & path, double dt, double radius, auto && dist_fn)
{
  constexpr double kReachSlack = 1e-9;  // m, absorbs rounding in stored positions
  for (const auto & pp : path) {
    if (dist_fn(pp.p) <= radius + kReachSlack) {
      return static_cast<double>(pp.t) * dt;
    }
  }
  return std::nullopt;
}
}  // namespace

LeaderFollowerResult leader_follower_metrics(
  const TrackView & a, const TrackView & b, double dt, const InteractionParams & params)
{
  const auto va = speeds_of(a, dt);
  const auto vb = speeds_of(b, dt);
  LeaderFollowerResult r;
  r.a_follows_b = follower_steps(a, va, b, vb, params);
  r.b_follows_a = follower_steps(b, vb, a, va, params);
  for (const auto * steps : {&r.a_follows_b, &r.b_follows_a}) {
    for (const auto & st : *steps) {
      if (!st.relation) {
        continue;
      }
      if (st.thw) {
        r.min_thw = std::min(r.min_thw, *st.thw);
      }
      if (st.ttc) {
        r.min_ttc = std::min(r.min_ttc, *st.ttc);
      }
      r.max_drac = std::max(r.max_drac, st.drac);
    }
  }
  return r;
}

std::vector<ConflictPoint> conflict_points(
  const TrackView & path_i, const TrackView & path_j, std::span<const MapFeature> map_features,
  double dt, const InteractionParams & params)
{
  std::vector<ConflictPoint> out;
  const auto pi = valid_path(path_i);
  const auto pj = valid_path(path_j);
  if (pi.empty() || pj.empty()) {
    return out;
  }

  const auto boxes_i = chunk_boxes(pi);
  const auto boxes_j = chunk_boxes(pj);
  std::vector<Vec2> crossings;
  for (std::size_t ci = 0; ci < boxes_i.size(); ++ci) {
    for (std::size_t cj = 0; cj < boxes_j.size(); ++cj) {
      if (!boxes_i[ci].overlaps(boxes_j[cj])) {
        continue;
      }
      const std::size_t i_end = std::min(pi.size() - 1, (ci + 1) * kChunk);
      const std::size_t j_end = std::min(pj.size() - 1, (cj + 1) * kChunk);
      for (std::size_t a = ci * kChunk; a < i_end; ++a) {
        for (std::size_t b = cj * kChunk; b < j_end; ++b) {
          const Vec2 & a0 = pi[a].p;
          const Vec2 & a1 = pi[a + 1].p;
          const Vec2 & b0 = pj[b].p;
          const Vec2 & b1 = pj[b + 1].p;
          if (std::max(a0.x, a1.x) < std::min(b0.x, b1.x) ||
              std::max(b0.x, b1.x) < std::min(a0.x, a1.x) ||
              std::max(a0.y, a1.y) < std::min(b0.y, b1.y) ||
              std::max(b0.y, b1.y) < std::min(a0.y, a1.y)) {
            continue;
          }
          // Near-parallel overlaps (shared lane) are not crossings.
          const Vec2 ra = a1 - a0;
          const Vec2 rb = b1 - b0;
          if (std::abs(cross(ra, rb)) <= params.crossing_min_sin * norm(ra) * norm(rb)) {
            continue;
          }
          const auto x = segment_intersection(a0, a1, b0, b1);
          if (!x) {
            continue;
          }
          const bool seen = std::any_of(crossings.begin(), crossings.end(), [&](const Vec2 & c) {
            return distance(c, *x) <= params.crossing_tolerance;
          });
          if (!seen) {
            crossings.push_back(*x);
          }
        }
      }
    }
  }

  for (const auto & c : crossings) {
    auto to_point = [&c](const Vec2 & p) { return distance(p, c); };
    out.push_back(
      {c, ConflictKind::trajectory_crossing, first_reach(pi, dt, params.reach_radius, to_point),
       first_reach(pj, dt, params.reach_radius, to_point)});
  }

  for (const auto & f : map_features) {
    if (f.geometry.empty()) {
      continue;
    }
    auto to_feature = [&f](const Vec2 & p) { return point_polygon_distance(p, f.geometry); };
    const auto ti = first_reach(pi, dt, params.reach_radius, to_feature);
    if (!ti) {
      continue;
    }
    const auto tj = first_reach(pj, dt, params.reach_radius, to_feature);
    if (!tj) {
      continue;
    }
    out.push_back({centroid(f.geometry), ConflictKind::map_feature, ti, tj});
  }
  return out;
}

DeltaMttcp delta_mttcp(std::span<const ConflictPoint> points)
{
  DeltaMttcp out;
  for (const auto & cp : points) {
    if (!cp.t_reach_i || !cp.t_reach_j) {
      continue;
    }
    const double gap = std::abs(*cp.t_reach_i - *cp.t_reach_j);
    double & slot = cp.kind == ConflictKind::trajectory_crossing ? out.trajectory : out.map;
    slot = std::min(slot, gap);
  }
  return out;
}

bool collide_at(const TrackView & a, const TrackView & b, std::size_t t)
{
  const auto & sa = a.states[t];
  const auto & sb = b.states[t];
  if (!sa.valid || !sb.valid) {
    return false;
  }
  const OrientedBox box_a{sa.position(), sa.heading, a.length, a.width};
  const OrientedBox box_b{sb.position(), sb.heading, b.length, b.width};
  if (boxes_overlap(box_a, box_b)) {
    return true;
  }
  if (t == 0 || !a.states[t - 1].valid || !b.states[t - 1].valid) {
    return false;
  }
  return segments_touch(
    a.states[t - 1].position(), sa.position(), b.states[t - 1].position(), sb.position());
}

CollisionResult detect_collisions(
  const TrackView & a, const TrackView & b, std::optional<IndexRange> range)
{
  CollisionResult out;
  const std::size_t n = std::min(a.states.size(), b.states.size());
  const IndexRange r = range.value_or(IndexRange{0, n});
  bool in_run = false;
  for (std::size_t t = r.begin; t < std::min(r.end, n); ++t) {
    const bool hit = collide_at(a, b, t);
    if (hit) {
      out.colliding_steps.push_back(t);
      if (!in_run) {
        ++out.collision_count;
      }
    }
    in_run = hit;
  }
  return out;
}

InteractionFeatures extract_interaction_features(
  const TrackView & a, const TrackView & b, std::span<const MapFeature> map_features, double dt,
  const InteractionParams & params)
{
  InteractionFeatures f;
  const auto lf = leader_follower_metrics(a, b, dt, params);
  f.min_thw = lf.min_thw;
  f.min_ttc = lf.min_ttc;
  f.max_drac = lf.max_drac;
  const auto cps = conflict_points(a, b, map_features, dt, params);
  const auto dm = delta_mttcp(cps);
  f.min_delta_mttcp_traj = dm.trajectory;
  f.min_delta_mttcp_map = dm.map;
  f.collision_count = static_cast<double>(detect_collisions(a, b).collision_count);
  return f;
}

}  // namespace scenmine
