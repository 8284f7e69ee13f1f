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

#include "scenmine/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace scenmine
{

double pearson(std::span<const double> x, std::span<const double> y, bool * zero_variance)
{
  double mx = 0.0;
  double my = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::isfinite(x[k]) && std::isfinite(y[k])) {
      mx += x[k];
      my += y[k];
      ++n;
    }
  }
  if (zero_variance != nullptr) {
    *zero_variance = false;
  }
  if (n < 2) {
    if (zero_variance != nullptr) {
      *zero_variance = true;
    }
    return 0.0;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::isfinite(x[k]) && std::isfinite(y[k])) {
      const double dx = x[k] - mx;
      const double dy = y[k] - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    if (zero_variance != nullptr) {
      *zero_variance = true;
    }
    return 0.0;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult correlation_matrix(
  const std::vector<std::vector<double>> & columns, const std::vector<std::string> & names)
{
  if (columns.size() != names.size()) {
    throw std::invalid_argument("column and name counts differ");
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto & c : columns) {
    if (c.size() != rows) {
      throw std::invalid_argument("columns differ in length");
    }
  }
  if (rows < 2) {
    throw std::invalid_argument("correlation needs at least 2 rows");
  }
  CorrelationResult r;
  r.columns = names;
  const std::size_t m = columns.size();
  r.matrix.assign(m, std::vector<double>(m, 0.0));
  std::vector<bool> flagged(m, false);
  for (std::size_t a = 0; a < m; ++a) {
    r.matrix[a][a] = 1.0;
    for (std::size_t b = a + 1; b < m; ++b) {
      bool zero = false;
      const double c = pearson(columns[a], columns[b], &zero);
      r.matrix[a][b] = c;
      r.matrix[b][a] = c;
      if (zero) {
        flagged[a] = flagged[a] || !(pearson(columns[a], columns[a]) > 0.0);
        flagged[b] = flagged[b] || !(pearson(columns[b], columns[b]) > 0.0);
      }
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    if (flagged[a]) {
      r.flags.push_back(names[a]);
    }
  }
  return r;
}

AgentFeatureTable agent_feature_table(
  const std::vector<ScenarioFeatureSet> & sets, const std::string & variant)
{
  if (variant != "gt" && variant != "fe") {
    throw std::invalid_argument("variant must be gt or fe");
  }
  const bool gt = variant == "gt";
  AgentFeatureTable t;
  for (const auto n : IndividualFeatures::kNames) {
    t.names.emplace_back(n);
  }
  for (const auto n : InteractionFeatures::kNames) {
    t.names.emplace_back(n);
  }
  t.columns.assign(t.names.size(), {});
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto & set : sets) {
    std::vector<InteractionVector> agg(set.agents.size(), {inf, inf, 0.0, inf, inf, 0.0});
    for (const auto & p : set.pairs) {
      const auto & v = gt ? p.gt : p.fe;
      for (const auto a : {p.i, p.j}) {
        auto & g = agg[a];
        g[0] = std::min(g[0], v[0]);
        g[1] = std::min(g[1], v[1]);
        g[2] = std::max(g[2], v[2]);
        g[3] = std::min(g[3], v[3]);
        g[4] = std::min(g[4], v[4]);
        g[5] += v[5];
      }
    }
    for (std::size_t a = 0; a < set.agents.size(); ++a) {
      const auto & ind = gt ? set.agents[a].gt : set.agents[a].fe;
      for (std::size_t f = 0; f < kNumIndividual; ++f) {
        t.columns[f].push_back(ind[f]);
      }
      for (std::size_t f = 0; f < kNumInteraction; ++f) {
        t.columns[kNumIndividual + f].push_back(agg[a][f]);
      }
    }
  }
  return t;
}

void write_correlation_csv(std::ostream & out, const CorrelationResult & r)
{
  out << "feature";
  for (const auto & c : r.columns) {
    out << ',' << c;
  }
  out << '\n';
  for (std::size_t a = 0; a < r.columns.size(); ++a) {
    out << r.columns[a];
    for (std::size_t b = 0; b < r.columns.size(); ++b) {
      out << ',' << format_number(r.matrix[a][b]);
    }
    out << '\n';
  }
}

namespace
{
double mean_of(std::span<const double> v)
{
  double s = 0.0;
  for (const double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}
}  // namespace

double sample_stddev(std::span<const double> values)
{
  if (values.size() < 2) {
    return 0.0;
  }
  const double m = mean_of(values);
  double ss = 0.0;
  for (const double x : values) {
    ss += (x - m) * (x - m);
  }
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double sample_skewness(std::span<const double> values)
{
  if (values.size() < 2) {
    return 0.0;
  }
  const double m = mean_of(values);
  double m2 = 0.0;
  double m3 = 0.0;
  for (const double x : values) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(values.size());
  m2 /= n;
  m3 /= n;
  // Relative cutoff so a constant sample with rounding noise reports 0.
  if (!(m2 > 1e-24 * std::max(1.0, m * m))) {
    return 0.0;
  }
  return m3 / std::pow(m2, 1.5);
}

Histogram score_histogram(std::span<const double> values, std::size_t bins)
{
  if (values.size() < 2) {
    throw std::invalid_argument("histogram needs at least 2 values");
  }
  if (bins == 0) {
    throw std::invalid_argument("histogram needs at least 1 bin");
  }
  Histogram h;
  h.n = values.size();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  const bool constant = !(hi > lo);
  std::size_t nb = bins;
  if (constant) {
    lo -= 0.5;
    hi += 0.5;
    nb = 1;
  }
  const double width = (hi - lo) / static_cast<double>(nb);
  h.edges.resize(nb + 1);
  for (std::size_t k = 0; k <= nb; ++k) {
    h.edges[k] = lo + width * static_cast<double>(k);
  }
  h.edges.back() = hi;
  h.counts.assign(nb, 0);
  for (const double v : values) {
    auto k = static_cast<std::size_t>(std::floor((v - lo) / width));
    k = std::min(k, nb - 1);
    ++h.counts[k];
  }
  h.density.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    h.density[k] = static_cast<double>(h.counts[k]) /
                   (static_cast<double>(h.n) * (h.edges[k + 1] - h.edges[k]));
  }
  h.mean = mean_of(values);
  h.stddev = constant ? 0.0 : sample_stddev(values);
  h.skewness = constant ? 0.0 : sample_skewness(values);
  return h;
}

std::vector<Histogram> scene_histograms(const std::vector<ScenarioScores> & scores, std::size_t bins)
{
  std::vector<Histogram> out;
  std::vector<double> values(scores.size());
  for (std::size_t v = 0; v < kScoreVariants.size(); ++v) {
    for (std::size_t k = 0; k < scores.size(); ++k) {
      values[k] = scores[k].scene.variants[v];
    }
    auto h = score_histogram(values, bins);
    h.variant = to_string(kScoreVariants[v]);
    out.push_back(std::move(h));
  }
  return out;
}

void write_histograms_csv(std::ostream & out, const std::vector<Histogram> & hists)
{
  out << "variant,bin_lo,bin_hi,count,density\n";
  for (const auto & h : hists) {
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      out << h.variant << ',' << format_number(h.edges[k]) << ',' << format_number(h.edges[k + 1])
          << ',' << h.counts[k] << ',' << format_number(h.density[k]) << '\n';
    }
  }
}

std::string histogram_summary_json(const std::vector<Histogram> & hists)
{
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto & h : hists) {
    nlohmann::ordered_json v;
    v["n"] = h.n;
    v["mean"] = h.mean;
    v["std"] = h.stddev;
    v["skewness"] = h.skewness;
    v["min"] = h.edges.front();
    v["max"] = h.edges.back();
    j[h.variant] = std::move(v);
  }
  return j.dump(2);
}

}  // namespace scenmine
