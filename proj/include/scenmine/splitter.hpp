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

#ifndef SCENMINE__SPLITTER_HPP_
#define SCENMINE__SPLITTER_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace scenmine
{

enum class Partition { train, val, test };
enum class SplitMethod { uniform, scoring };

std::string_view to_string(Partition p);
std::string_view to_string(SplitMethod m);
Partition partition_from_string(std::string_view s);

struct SplitAssignment
{
  SplitMethod method{SplitMethod::uniform};
  std::uint64_t seed{0};
  double ood_fraction{0.2};
  double val_fraction_of_id{0.2};
  std::array<double, 3> ratios{0.64, 0.16, 0.20};
  /// Sorted by scenario id.
  std::vector<std::pair<std::string, Partition>> entries;

  std::size_t count(Partition p) const;
  std::unordered_set<std::string> ids(Partition p) const;
};

/// Uniform integer in [0, n) by rejection, independent of the standard library's
/// distribution implementation.
std::uint64_t bounded_uniform(std::mt19937_64 & rng, std::uint64_t n);

/// Fisher-Yates with bounded_uniform.
template <typename T>
void seeded_shuffle(std::vector<T> & v, std::mt19937_64 & rng)
{
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_uniform(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Sorted ids shuffled by `seed`, then sliced; val and test sizes are floored and the
/// remainder goes to train. Throws std::invalid_argument on empty or duplicate ids or
/// ratios that do not sum to 1.
SplitAssignment uniform_split(
  std::vector<std::string> ids, std::array<double, 3> ratios, std::uint64_t seed);

/// The ceil(ood_fraction * n) highest scores (ties by id ascending) form the test set; the
/// rest is shuffled by `seed` and split into val (floor of val_fraction_of_id) and train.
SplitAssignment scoring_split(
  std::vector<std::pair<std::string, double>> scores, double ood_fraction,
  double val_fraction_of_id, std::uint64_t seed);

/// JSON header line followed by `id<TAB>partition` lines.
void write_split_manifest(std::ostream & out, const SplitAssignment & split);
SplitAssignment read_split_manifest(std::istream & in);

}  // namespace scenmine

#endif  // SCENMINE__SPLITTER_HPP_
