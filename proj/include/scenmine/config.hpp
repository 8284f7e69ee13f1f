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

#ifndef SCENMINE__CONFIG_HPP_
#define SCENMINE__CONFIG_HPP_

#include "scenmine/anomaly.hpp"
#include "scenmine/features_individual.hpp"
#include "scenmine/features_interaction.hpp"
#include "scenmine/lane_assignment.hpp"
#include "scenmine/scoring.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scenmine
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class CollisionModeRule { top_confidence, best_ade };

struct PipelineConfig
{
  AssignmentParams assignment;
  IndividualParams individual;
  InteractionParams interaction;
  PrimitiveParams primitives;
  ExtrapolationParams extrapolation;
  ScoreWeights weights;

  double normalizer_epsilon{0.1};
  double normalizer_q_low{0.05};
  double normalizer_q_high{0.95};
  double normalizer_min_span{1e-3};

  bool anomaly_enabled{true};
  int anomaly_max_fit_samples{20000};

  double loss_weight_scale{1.0};

  double split_ood_fraction{0.2};
  double split_val_fraction_of_id{0.2};
  double split_ratio_train{0.64};
  double split_ratio_val{0.16};
  double split_ratio_test{0.20};
  std::uint64_t seed{0};

  std::string eval_cr_mode{"top_confidence"};

  int workers{0};  // 0 = hardware concurrency

  /// Sets one key. Throws ConfigError on an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  /// Applies `key=value` lines; blank lines and `#` comments are skipped.
  void apply_text(std::string_view text);
  void apply_file(const std::string & path);
  /// `k=v` override as given on the command line.
  void apply_override(std::string_view assignment);

  /// Every key in canonical order, one `key=value` per line.
  std::string dump() const;
  static std::vector<std::string> keys();

  CollisionModeRule cr_mode() const;
};

/// Defaults, then the optional file, then each override in order.
PipelineConfig load_config(const std::string & path, const std::vector<std::string> & overrides);

}  // namespace scenmine

#endif  // SCENMINE__CONFIG_HPP_
