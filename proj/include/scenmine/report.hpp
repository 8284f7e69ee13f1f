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

#ifndef SCENMINE__REPORT_HPP_
#define SCENMINE__REPORT_HPP_

#include "scenmine/pipeline.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace scenmine
{

struct CorrelationResult
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> matrix;
  /// Columns with zero variance over some pairwise-complete sample; their coefficients are 0.
  std::vector<std::string> flags;
};

/// Pearson coefficients between columns, each pair using the rows where both values are
/// finite. Throws std::invalid_argument on ragged columns or fewer than 2 rows.
CorrelationResult correlation_matrix(
  const std::vector<std::vector<double>> & columns, const std::vector<std::string> & names);

double pearson(std::span<const double> x, std::span<const double> y, bool * zero_variance = nullptr);

/// One row per agent: the 7 individual features of the chosen variant ("gt" or "fe") and
/// its pair features reduced over the pairs it belongs to (minimum for the time-based
/// ones, maximum for DRAC, sum for collisions; +inf or 0 without pairs).
struct AgentFeatureTable
{
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};
AgentFeatureTable agent_feature_table(
  const std::vector<ScenarioFeatureSet> & sets, const std::string & variant);

void write_correlation_csv(std::ostream & out, const CorrelationResult & r);

struct Histogram
{
  std::string variant;
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
  std::vector<double> density;
  std::size_t n{0};
  double mean{0.0};
  double stddev{0.0};    // sample standard deviation
  double skewness{0.0};  // moment coefficient, 0 for a constant sample
};

/// Density-normalized histogram over [min, max]; a constant sample fills a single bin of
/// unit width centred on the value. Throws std::invalid_argument with fewer than 2 values.
Histogram score_histogram(std::span<const double> values, std::size_t bins = 100);

double sample_skewness(std::span<const double> values);
double sample_stddev(std::span<const double> values);

/// Histograms of the scene score for every score variant.
std::vector<Histogram> scene_histograms(
  const std::vector<ScenarioScores> & scores, std::size_t bins = 100);

void write_histograms_csv(std::ostream & out, const std::vector<Histogram> & hists);
std::string histogram_summary_json(const std::vector<Histogram> & hists);

}  // namespace scenmine

#endif  // SCENMINE__REPORT_HPP_
