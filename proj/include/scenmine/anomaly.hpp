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

#ifndef SCENMINE__ANOMALY_HPP_
#define SCENMINE__ANOMALY_HPP_

#include "scenmine/scenario.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scenmine
{

struct PrimitiveParams
{
  int k{32};
  int resample{16};  // M
  std::uint64_t seed{0};
  int max_iterations{100};
  double tolerance{1e-4};  // stop once the summed squared centroid shift falls below this
};

/// Resamples the valid positions to `m` equally spaced times (linear interpolation,
/// gaps bridged), moves the first point to the origin and rotates the first valid
/// heading onto +x. Returns 2m values, all zero with fewer than 2 valid steps.
std::vector<double> to_primitive(std::span<const AgentState> track, int m = 16);

/// Both tracks resampled over their common valid window in the canonical frame of `a`.
/// Returns 4m values: a's 2m followed by b's 2m.
std::vector<double> to_pair_primitive(
  std::span<const AgentState> a, std::span<const AgentState> b, int m = 16);

struct PrimitiveModel
{
  int k{0};
  int resample{16};
  int max_iterations{100};
  std::uint64_t seed{0};
  std::string fit_partition_id;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<std::vector<double>> centroids;  // standardized space
  double median_distance{1.0};

  std::size_t dim() const { return mean.size(); }

  std::string to_json() const;
  static PrimitiveModel from_json(const std::string & text);
};

struct PrimitiveFit
{
  PrimitiveModel model;
  std::vector<std::string> warnings;
};

/// k-means on per-dimension standardized vectors with seeded k-means++ seeding and a
/// fixed iteration cap. Deterministic for a given seed. Throws std::invalid_argument on
/// an empty or ragged input or when there are fewer primitives than k.
PrimitiveFit fit_primitive_clusters(
  const std::vector<std::vector<double>> & primitives, const PrimitiveParams & params,
  std::string fit_partition_id);

/// Distance to the nearest centroid in standardized space over the median training distance.
double anomaly_score(std::span<const double> primitive, const PrimitiveModel & model);

}  // namespace scenmine

#endif  // SCENMINE__ANOMALY_HPP_
