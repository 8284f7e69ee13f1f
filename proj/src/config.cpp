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

#include "scenmine/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

namespace scenmine
{

namespace
{
using Slot = std::variant<double *, int *, std::uint64_t *, bool *, std::string *>;

struct Entry
{
  std::string key;
  Slot slot;
};

template <typename Config>
std::vector<Entry> entries(Config & c)
{
  std::vector<Entry> e{
    {"assignment.sigma_d", &c.assignment.sigma_d},
    {"assignment.sigma_theta", &c.assignment.sigma_theta},
    {"assignment.max_deflection", &c.assignment.max_deflection},
    {"assignment.beam_width", &c.assignment.beam_width},
    {"assignment.max_lateral", &c.assignment.max_lateral},
    {"individual.wait_speed", &c.individual.wait_speed},
    {"individual.wait_radius", &c.individual.wait_radius},
    {"individual.follow_max_d", &c.individual.follow_max_d},
    {"individual.follow_max_heading", &c.individual.follow_max_heading},
    {"interaction.gate_distance", &c.interaction.gate_distance},
    {"interaction.cone_half_angle", &c.interaction.cone_half_angle},
    {"interaction.max_heading_difference", &c.interaction.max_heading_difference},
    {"interaction.min_follower_speed", &c.interaction.min_follower_speed},
    {"interaction.min_gap", &c.interaction.min_gap},
    {"interaction.crossing_tolerance", &c.interaction.crossing_tolerance},
    {"interaction.crossing_min_sin", &c.interaction.crossing_min_sin},
    {"interaction.reach_radius", &c.interaction.reach_radius},
    {"anomaly.enabled", &c.anomaly_enabled},
    {"anomaly.k", &c.primitives.k},
    {"anomaly.resample", &c.primitives.resample},
    {"anomaly.max_iterations", &c.primitives.max_iterations},
    {"anomaly.tolerance", &c.primitives.tolerance},
    {"anomaly.max_fit_samples", &c.anomaly_max_fit_samples},
    {"extrapolation.window", &c.extrapolation.window},
    {"extrapolation.chain_gap", &c.extrapolation.chain_gap},
    {"normalizer.epsilon", &c.normalizer_epsilon},
    {"normalizer.q_low", &c.normalizer_q_low},
    {"normalizer.q_high", &c.normalizer_q_high},
    {"normalizer.min_span", &c.normalizer_min_span},
  };
  for (std::size_t f = 0; f < kNumIndividual; ++f) {
    e.push_back(
      {"weight.individual." + std::string(IndividualFeatures::kNames[f]),
       &c.weights.individual[f]});
  }
  for (std::size_t f = 0; f < kNumInteraction; ++f) {
    e.push_back(
      {"weight.interaction." + std::string(InteractionFeatures::kNames[f]),
       &c.weights.interaction[f]});
  }
  std::vector<Entry> tail{
    {"loss_weight.scale", &c.loss_weight_scale},
    {"split.ood_fraction", &c.split_ood_fraction},
    {"split.val_fraction_of_id", &c.split_val_fraction_of_id},
    {"split.ratio_train", &c.split_ratio_train},
    {"split.ratio_val", &c.split_ratio_val},
    {"split.ratio_test", &c.split_ratio_test},
    {"seed", &c.seed},
    {"eval.cr_mode", &c.eval_cr_mode},
    {"workers", &c.workers},
  };
  e.insert(e.end(), tail.begin(), tail.end());
  return e;
}

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value)
{
  T out{};
  const auto * end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config key " + std::string(key) + ": bad value '" + std::string(value) + "'");
  }
  return out;
}

std::string format_double(double v)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}
}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value)
{
  key = trim(key);
  value = trim(value);
  for (auto & e : entries(*this)) {
    if (e.key != key) {
      continue;
    }
    std::visit(
      [&](auto * p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") {
            *p = true;
          } else if (value == "false" || value == "0") {
            *p = false;
          } else {
            throw ConfigError("config key " + std::string(key) + ": expected true or false");
          }
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = std::string(value);
        } else {
          *p = parse_number<T>(key, value);
        }
      },
      e.slot);
    if (key == "eval.cr_mode") {
      cr_mode();
    }
    return;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void PipelineConfig::apply_text(std::string_view text)
{
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void PipelineConfig::apply_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_text(ss.str());
}

void PipelineConfig::apply_override(std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string PipelineConfig::dump() const
{
  auto copy = *this;
  std::string out;
  for (const auto & e : entries(copy)) {
    out += e.key;
    out += '=';
    std::visit(
      [&](auto * p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          out += *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          out += *p;
        } else if constexpr (std::is_same_v<T, double>) {
          out += format_double(*p);
        } else {
          out += std::to_string(*p);
        }
      },
      e.slot);
    out += '\n';
  }
  return out;
}

std::vector<std::string> PipelineConfig::keys()
{
  PipelineConfig c;
  std::vector<std::string> out;
  for (const auto & e : entries(c)) {
    out.push_back(e.key);
  }
  return out;
}

CollisionModeRule PipelineConfig::cr_mode() const
{
  if (eval_cr_mode == "top_confidence") {
    return CollisionModeRule::top_confidence;
  }
  if (eval_cr_mode == "best_ade") {
    return CollisionModeRule::best_ade;
  }
  throw ConfigError("eval.cr_mode must be top_confidence or best_ade");
}

PipelineConfig load_config(const std::string & path, const std::vector<std::string> & overrides)
{
  PipelineConfig c;
  if (!path.empty()) {
    c.apply_file(path);
  }
  for (const auto & o : overrides) {
    c.apply_override(o);
  }
  return c;
}

}  // namespace scenmine
