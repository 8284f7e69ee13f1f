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

#include "scenmine/anomaly.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace scenmine
{

namespace
{
struct Sample
{
  double t;
  Vec2 p;
};

std::vector<Sample> valid_samples(std::span<const AgentState> track)
{
  std::vector<Sample> out;
  for (std::size_t t = 0; t < track.size(); ++t) {
    if (track[t].valid) {
      out.push_back({static_cast<double>(t), track[t].position()});
    }
  }
  return out;
}

// Linear interpolation of the samples at `m` equally spaced times over [t0, t1].
std::vector<Vec2> resample(const std::vector<Sample> & samples, double t0, double t1, int m)
{
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(m));
  std::size_t k = 0;
  for (int i = 0; i < m; ++i) {
    const double tau = m == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(i) / (m - 1);
    while (k + 1 < samples.size() && samples[k + 1].t <= tau) {
      ++k;
    }
    if (k + 1 >= samples.size() || samples[k].t >= tau) {
      out.push_back(samples[k].p);
      continue;
    }
    const auto & a = samples[k];
    const auto & b = samples[k + 1];
    const double w = (tau - a.t) / (b.t - a.t);
    out.push_back(a.p + (b.p - a.p) * w);
  }
  return out;
}

double first_valid_heading_at_or_after(std::span<const AgentState> track, double t0)
{
  for (std::size_t t = static_cast<std::size_t>(std::ceil(t0)); t < track.size(); ++t) {
    if (track[t].valid) {
      return track[t].heading;
    }
  }
  return 0.0;
}

void append_canonical(
  std::vector<double> & out, const std::vector<Vec2> & pts, const Vec2 & origin, double heading)
{
  for (const auto & p : pts) {
    const Vec2 q = rotate(p - origin, -heading);
    out.push_back(q.x);
    out.push_back(q.y);
  }
}

double uniform01(std::mt19937_64 & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sq_dist(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(
  std::span<const double> x, const std::vector<std::vector<double>> & centroids, double * d2)
{
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  const std::size_t n = x.size();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double * y = centroids[c].data();
    double d = 0.0;
    std::size_t i = 0;
    // Partial sums only grow, so a candidate can be dropped once it reaches the best.
    while (i < n && d < best_d) {
      const std::size_t stop = std::min(n, i + 8);
      for (; i < stop; ++i) {
        const double r = x[i] - y[i];
        d += r * r;
      }
    }
    if (i == n && d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (d2 != nullptr) {
    *d2 = best_d;
  }
  return best;
}
}  // namespace

std::vector<double> to_primitive(std::span<const AgentState> track, int m)
{
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * m));
  const auto samples = valid_samples(track);
  if (samples.size() < 2) {
    out.assign(static_cast<std::size_t>(2 * m), 0.0);
    return out;
  }
  const auto pts = resample(samples, samples.front().t, samples.back().t, m);
  append_canonical(out, pts, pts.front(), first_valid_heading_at_or_after(track, 0.0));
  return out;
}

std::vector<double> to_pair_primitive(
  std::span<const AgentState> a, std::span<const AgentState> b, int m)
{
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(4 * m));
  const auto sa = valid_samples(a);
  const auto sb = valid_samples(b);
  if (sa.size() < 2 || sb.size() < 2) {
    out.assign(static_cast<std::size_t>(4 * m), 0.0);
    return out;
  }
  double t0 = std::max(sa.front().t, sb.front().t);
  double t1 = std::min(sa.back().t, sb.back().t);
  std::vector<Vec2> pa;
  std::vector<Vec2> pb;
  if (t1 > t0) {
    pa = resample(sa, t0, t1, m);
    pb = resample(sb, t0, t1, m);
  } else {
    t0 = sa.front().t;
    pa = resample(sa, sa.front().t, sa.back().t, m);
    pb = resample(sb, sb.front().t, sb.back().t, m);
  }
  const Vec2 origin = pa.front();
  const double heading = first_valid_heading_at_or_after(a, t0);
  append_canonical(out, pa, origin, heading);
  append_canonical(out, pb, origin, heading);
  return out;
}

PrimitiveFit fit_primitive_clusters(
  const std::vector<std::vector<double>> & primitives, const PrimitiveParams & params,
  std::string fit_partition_id)
{
  if (primitives.empty()) {
    throw std::invalid_argument("no primitives to fit");
  }
  const std::size_t dim = primitives.front().size();
  for (const auto & p : primitives) {
    if (p.size() != dim) {
      throw std::invalid_argument("primitives have inconsistent dimensions");
    }
  }
  if (params.k < 1 || primitives.size() < static_cast<std::size_t>(params.k)) {
    throw std::invalid_argument("fewer primitives than clusters");
  }

  PrimitiveFit fit;
  PrimitiveModel & model = fit.model;
  model.resample = params.resample;
  model.max_iterations = params.max_iterations;
  model.seed = params.seed;
  model.fit_partition_id = std::move(fit_partition_id);

  const double n = static_cast<double>(primitives.size());
  model.mean.assign(dim, 0.0);
  model.scale.assign(dim, 0.0);
  for (const auto & p : primitives) {
    for (std::size_t d = 0; d < dim; ++d) {
      model.mean[d] += p[d] / n;
    }
  }
  for (const auto & p : primitives) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double r = p[d] - model.mean[d];
      model.scale[d] += r * r / n;
    }
  }
  for (auto & s : model.scale) {
    s = s > 0.0 ? std::sqrt(s) : 1.0;
  }

  std::vector<std::vector<double>> z;
  z.reserve(primitives.size());
  for (const auto & p : primitives) {
    std::vector<double> v(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = (p[d] - model.mean[d]) / model.scale[d];
    }
    z.push_back(std::move(v));
  }

  auto sorted = z;
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = static_cast<std::size_t>(
    std::distance(sorted.begin(), std::unique(sorted.begin(), sorted.end())));
  std::size_t k = static_cast<std::size_t>(params.k);
  if (distinct < k) {
    fit.warnings.push_back(
      "only " + std::to_string(distinct) + " distinct primitives; k reduced from " +
      std::to_string(k));
    k = distinct;
  }
  model.k = static_cast<int>(k);

  // k-means++ seeding.
  std::mt19937_64 rng(params.seed);
  std::vector<double> d2(z.size(), std::numeric_limits<double>::infinity());
  model.centroids.push_back(z[static_cast<std::size_t>(uniform01(rng) * z.size()) % z.size()]);
  while (model.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      d2[i] = std::min(d2[i], sq_dist(z[i], model.centroids.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (pick = 0; pick + 1 < z.size(); ++pick) {
        target -= d2[pick];
        if (target < 0.0 && d2[pick] > 0.0) {
          break;
        }
      }
      while (d2[pick] == 0.0) {
        pick = (pick + 1) % z.size();
      }
    }
    model.centroids.push_back(z[pick]);
  }

  // Lloyd iterations with Hamerly's bounds: upper[i] bounds the distance to the assigned
  // centroid, lower[i] the distance to every other one.
  const std::size_t n_pts = z.size();
  std::vector<std::size_t> assign(n_pts, 0);
  std::vector<double> upper(n_pts, 0.0);
  std::vector<double> lower(n_pts, 0.0);
  auto full_scan = [&](std::size_t i) {
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = sq_dist(z[i], model.centroids[c]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = c;
      } else if (d < d2) {
        d2 = d;
      }
    }
    const bool moved = best != assign[i];
    assign[i] = best;
    upper[i] = std::sqrt(d1);
    lower[i] = std::sqrt(d2);
    return moved;
  };
  std::vector<double> half_gap(k, 0.0);
  std::vector<double> delta(k, 0.0);
  std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (int it = 0; it < params.max_iterations; ++it) {
    bool changed = it == 0;
    if (it == 0) {
      for (std::size_t i = 0; i < n_pts; ++i) {
        full_scan(i);
      }
    } else {
      for (std::size_t c = 0; c < k; ++c) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < k; ++o) {
          if (o != c) {
            m = std::min(m, sq_dist(model.centroids[c], model.centroids[o]));
          }
        }
        half_gap[c] = 0.5 * std::sqrt(m);
      }
      for (std::size_t i = 0; i < n_pts; ++i) {
        const double bound = std::max(half_gap[assign[i]], lower[i]);
        if (upper[i] <= bound) {
          continue;
        }
        upper[i] = std::sqrt(sq_dist(z[i], model.centroids[assign[i]]));
        if (upper[i] <= bound) {
          continue;
        }
        changed = full_scan(i) || changed;
      }
    }
    if (!changed) {
      break;
    }
    for (auto & s : sums) {
      std::fill(s.begin(), s.end(), 0.0);
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n_pts; ++i) {
      ++counts[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) {
        sums[assign[i]][d] += z[i][d];
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      delta[c] = 0.0;
      if (counts[c] == 0) {
        continue;
      }
      double moved = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double v = sums[c][d] / static_cast<double>(counts[c]);
        moved += (v - model.centroids[c][d]) * (v - model.centroids[c][d]);
        model.centroids[c][d] = v;
      }
      delta[c] = std::sqrt(moved);
      shift += moved;
    }
    std::size_t far = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (delta[c] > delta[far]) {
        far = c;
      }
    }
    double second = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (c != far) {
        second = std::max(second, delta[c]);
      }
    }
    for (std::size_t i = 0; i < n_pts; ++i) {
      upper[i] += delta[assign[i]];
      lower[i] -= assign[i] == far ? second : delta[far];
    }
    if (shift <= params.tolerance) {
      break;
    }
  }
  std::vector<double> dists;
  dists.reserve(z.size());
  for (const auto & v : z) {
    double dd = 0.0;
    nearest(v, model.centroids, &dd);
    dists.push_back(std::sqrt(dd));
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  double median = dists.size() % 2 == 1 ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
  if (!(median > 0.0)) {
    // Most points sit on a centroid; fall back to the mean nonzero distance.
    double sum = 0.0;
    std::size_t count = 0;
    for (const double d : dists) {
      if (d > 0.0) {
        sum += d;
        ++count;
      }
    }
    median = count > 0 ? sum / static_cast<double>(count) : 1.0;
    fit.warnings.push_back("median training distance is zero; using mean nonzero distance");
  }
  model.median_distance = median;
  return fit;
}

double anomaly_score(std::span<const double> primitive, const PrimitiveModel & model)
{
  if (primitive.size() != model.dim()) {
    throw std::invalid_argument("primitive dimension does not match the model");
  }
  std::vector<double> z(primitive.size());
  for (std::size_t d = 0; d < z.size(); ++d) {
    z[d] = (primitive[d] - model.mean[d]) / model.scale[d];
  }
  double d2 = 0.0;
  nearest(z, model.centroids, &d2);
  return std::sqrt(d2) / model.median_distance;
}

std::string PrimitiveModel::to_json() const
{
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["k"] = k;
  j["resample"] = resample;
  j["max_iterations"] = max_iterations;
  j["seed"] = seed;
  j["fit_partition_id"] = fit_partition_id;
  j["median_distance"] = median_distance;
  j["mean"] = mean;
  j["scale"] = scale;
  j["centroids"] = centroids;
  return j.dump();
}

PrimitiveModel PrimitiveModel::from_json(const std::string & text)
{
  const auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1) {
    throw std::invalid_argument("unsupported primitive model version");
  }
  PrimitiveModel m;
  m.k = j.at("k").get<int>();
  m.resample = j.at("resample").get<int>();
  m.max_iterations = j.at("max_iterations").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.fit_partition_id = j.at("fit_partition_id").get<std::string>();
  m.median_distance = j.at("median_distance").get<double>();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.scale = j.at("scale").get<std::vector<double>>();
  m.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
  return m;
}

}  // namespace scenmine
