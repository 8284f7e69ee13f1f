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

#include "scenmine/splitter.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace scenmine
{

std::string_view to_string(Partition p)
{
  switch (p) {
    case Partition::train:
      return "train";
    case Partition::val:
      return "val";
    case Partition::test:
      return "test";
  }
  return "train";
}

std::string_view to_string(SplitMethod m)
{
  return m == SplitMethod::uniform ? "uniform" : "scoring";
}

Partition partition_from_string(std::string_view s)
{
  if (s == "train") {
    return Partition::train;
  }
  if (s == "val") {
    return Partition::val;
  }
  if (s == "test") {
    return Partition::test;
  }
  throw std::invalid_argument("unknown partition '" + std::string(s) + "'");
}

std::size_t SplitAssignment::count(Partition p) const
{
  return static_cast<std::size_t>(std::count_if(
    entries.begin(), entries.end(), [p](const auto & e) { return e.second == p; }));
}

std::unordered_set<std::string> SplitAssignment::ids(Partition p) const
{
  std::unordered_set<std::string> out;
  for (const auto & e : entries) {
    if (e.second == p) {
      out.insert(e.first);
    }
  }
  return out;
}

std::uint64_t bounded_uniform(std::mt19937_64 & rng, std::uint64_t n)
{
  if (n == 0) {
    throw std::invalid_argument("bounded_uniform with n = 0");
  }
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  while (true) {
    const std::uint64_t x = rng();
    if (x <= limit) {
      return x % n;
    }
  }
}

namespace
{
void require_unique(std::vector<std::string> & sorted_ids)
{
  if (sorted_ids.empty()) {
    throw std::invalid_argument("no scenario ids to split");
  }
  const auto dup = std::adjacent_find(sorted_ids.begin(), sorted_ids.end());
  if (dup != sorted_ids.end()) {
    throw std::invalid_argument("duplicate scenario id '" + *dup + "'");
  }
}

std::size_t floor_size(double fraction, std::size_t n)
{
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

void finish(SplitAssignment & split)
{
  std::sort(split.entries.begin(), split.entries.end());
}
}  // namespace

SplitAssignment uniform_split(
  std::vector<std::string> ids, std::array<double, 3> ratios, std::uint64_t seed)
{
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9 ||
      std::any_of(ratios.begin(), ratios.end(), [](double r) { return r < 0.0; })) {
    throw std::invalid_argument("split ratios must be nonnegative and sum to 1");
  }
  std::sort(ids.begin(), ids.end());
  require_unique(ids);

  std::mt19937_64 rng(seed);
  seeded_shuffle(ids, rng);
  const std::size_t n = ids.size();
  const std::size_t n_val = floor_size(ratios[1], n);
  const std::size_t n_test = floor_size(ratios[2], n);
  const std::size_t n_train = n - n_val - n_test;

  SplitAssignment split;
  split.method = SplitMethod::uniform;
  split.seed = seed;
  split.ratios = ratios;
  split.ood_fraction = ratios[2];
  split.val_fraction_of_id = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Partition p = k < n_train ? Partition::train
                                    : (k < n_train + n_val ? Partition::val : Partition::test);
    split.entries.emplace_back(std::move(ids[k]), p);
  }
  finish(split);
  return split;
}

SplitAssignment scoring_split(
  std::vector<std::pair<std::string, double>> scores, double ood_fraction,
  double val_fraction_of_id, std::uint64_t seed)
{
  if (ood_fraction < 0.0 || ood_fraction > 1.0 || val_fraction_of_id < 0.0 ||
      val_fraction_of_id > 1.0) {
    throw std::invalid_argument("split fractions must lie in [0, 1]");
  }
  std::vector<std::string> ids;
  ids.reserve(scores.size());
  for (const auto & s : scores) {
    ids.push_back(s.first);
  }
  std::sort(ids.begin(), ids.end());
  require_unique(ids);

  std::sort(scores.begin(), scores.end(), [](const auto & a, const auto & b) {
    if (a.second != b.second) {
      return a.second > b.second;
    }
    return a.first < b.first;
  });
  const std::size_t n = scores.size();
  const auto n_test = std::min(
    n, static_cast<std::size_t>(std::ceil(ood_fraction * static_cast<double>(n) - 1e-9)));

  SplitAssignment split;
  split.method = SplitMethod::scoring;
  split.seed = seed;
  split.ood_fraction = ood_fraction;
  split.val_fraction_of_id = val_fraction_of_id;
  const double id_share = 1.0 - ood_fraction;
  split.ratios = {id_share * (1.0 - val_fraction_of_id), id_share * val_fraction_of_id,
                  ood_fraction};

  std::vector<std::string> rest;
  rest.reserve(n - n_test);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < n_test) {
      split.entries.emplace_back(std::move(scores[k].first), Partition::test);
    } else {
      rest.push_back(std::move(scores[k].first));
    }
  }
  std::sort(rest.begin(), rest.end());
  std::mt19937_64 rng(seed);
  seeded_shuffle(rest, rng);
  const std::size_t n_val = floor_size(val_fraction_of_id, rest.size());
  for (std::size_t k = 0; k < rest.size(); ++k) {
    split.entries.emplace_back(std::move(rest[k]), k < n_val ? Partition::val : Partition::train);
  }
  finish(split);
  return split;
}

void write_split_manifest(std::ostream & out, const SplitAssignment & split)
{
  nlohmann::ordered_json h;
  h["method"] = std::string(to_string(split.method));
  h["seed"] = split.seed;
  h["ood_fraction"] = split.ood_fraction;
  h["val_fraction_of_id"] = split.val_fraction_of_id;
  h["ratios"] = split.ratios;
  h["counts"] = {
    {"train", split.count(Partition::train)},
    {"val", split.count(Partition::val)},
    {"test", split.count(Partition::test)}};
  out << h.dump() << '\n';
  for (const auto & [id, p] : split.entries) {
    out << id << '\t' << to_string(p) << '\n';
  }
}

SplitAssignment read_split_manifest(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty split manifest");
  }
  SplitAssignment split;
  try {
    const auto h = nlohmann::json::parse(line);
    split.method =
      h.at("method").get<std::string>() == "scoring" ? SplitMethod::scoring : SplitMethod::uniform;
    split.seed = h.at("seed").get<std::uint64_t>();
    split.ood_fraction = h.at("ood_fraction").get<double>();
    split.val_fraction_of_id = h.at("val_fraction_of_id").get<double>();
    split.ratios = h.at("ratios").get<std::array<double, 3>>();
  } catch (const nlohmann::json::exception & e) {
    throw std::invalid_argument(std::string("bad split manifest header: ") + e.what());
  }
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::invalid_argument("bad split manifest line: " + line);
    }
    split.entries.emplace_back(line.substr(0, tab), partition_from_string(line.substr(tab + 1)));
  }
  finish(split);
  return split;
}

}  // namespace scenmine
