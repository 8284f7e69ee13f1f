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
#include "scenmine/eval_metrics.hpp"
#include "scenmine/pipeline.hpp"
#include "scenmine/report.hpp"
#include "scenmine/scenario.hpp"
#include "scenmine/splitter.hpp"
#include "scenmine/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace
{
using namespace scenmine;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::ofstream open_out(const std::string & path)
{
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError(path + ": cannot open for writing");
  }
  return out;
}

std::ifstream open_in(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(path + ": cannot open");
  }
  return in;
}

std::vector<Scenario> load_scenarios(const std::string & path)
{
  std::vector<Scenario> out;
  for (auto & p : load_scenario_dir(path)) {
    for (const auto & w : p.warnings) {
      std::cerr << "warning: " << p.scenario.scenario_id << ": " << w << '\n';
    }
    out.push_back(std::move(p.scenario));
  }
  if (out.empty()) {
    throw DataError(path + ": no scenarios found");
  }
  return out;
}

SplitAssignment load_split(const std::string & path)
{
  auto in = open_in(path);
  try {
    return read_split_manifest(in);
  } catch (const std::invalid_argument & e) {
    throw DataError(path + ": " + e.what());
  }
}

struct GlobalOptions
{
  std::string config_path;
  std::vector<std::string> overrides;
};

struct FeaturesOptions
{
  std::string scenarios;
  std::string out;
  std::string fit_split;
  std::string fit_partition{"train"};
};

int run_features(const FeaturesOptions & o, const PipelineConfig & config)
{
  const auto scenarios = load_scenarios(o.scenarios);
  std::unordered_set<std::string> fit_ids;
  const std::unordered_set<std::string> * fit = nullptr;
  std::string fit_name = "all";
  if (!o.fit_split.empty()) {
    fit_ids = load_split(o.fit_split).ids(partition_from_string(o.fit_partition));
    fit = &fit_ids;
    fit_name = o.fit_partition;
  }
  const auto result = run_pipeline(scenarios, config, fit, fit_name);
  for (const auto & w : result.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  write_feature_tables(o.out, result.features);
  std::cerr << "wrote features for " << result.features.size() << " scenarios to " << o.out << '\n';
  return kExitOk;
}

struct ScoreOptions
{
  std::string features;
  std::string normalizer_mode{"fit"};
  std::string normalizer_file;
  std::string out;
  std::string loss_weights;
  std::string fit_split;
  std::string fit_partition{"train"};
};

int run_score(const ScoreOptions & o, const PipelineConfig & config)
{
  const auto sets = read_feature_tables(o.features);
  FeatureNormalizer norm;
  if (o.normalizer_mode == "load") {
    if (o.normalizer_file.empty()) {
      throw CLI::ValidationError("--normalizer load requires --normalizer-file");
    }
    auto in = open_in(o.normalizer_file);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      norm = FeatureNormalizer::from_json(buf.str());
    } catch (const std::exception & e) {
      throw DataError(o.normalizer_file + ": " + e.what());
    }
  } else {
    std::unordered_set<std::string> fit_ids;
    const std::unordered_set<std::string> * fit = nullptr;
    if (!o.fit_split.empty()) {
      fit_ids = load_split(o.fit_split).ids(partition_from_string(o.fit_partition));
      fit = &fit_ids;
    }
    try {
      norm = fit_normalizer(sets, config, fit);
    } catch (const std::invalid_argument & e) {
      throw DataError(e.what());
    }
    for (const auto & w : norm.warnings()) {
      std::cerr << "warning: " << w << '\n';
    }
    if (!o.normalizer_file.empty()) {
      auto out = open_out(o.normalizer_file);
      out << norm.to_json() << '\n';
    }
  }
  const auto scores = parallel_map(sets.size(), config.workers, [&](std::size_t k) {
    return score_features(sets[k], norm, config.weights);
  });
  {
    auto out = open_out(o.out);
    write_scores_jsonl(out, scores);
  }
  if (!o.loss_weights.empty()) {
    std::vector<LossWeightRow> rows;
    for (const auto & s : scores) {
      auto r = loss_weights(s.scene.scenario_id, s.agents, config.loss_weight_scale);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    auto out = open_out(o.loss_weights);
    write_loss_weights_csv(out, rows);
  }
  return kExitOk;
}

struct SplitOptions
{
  std::string scores;
  std::string method{"scoring"};
  std::string variant{"asymmetric_combined"};
  std::uint64_t seed{0};
  bool seed_set{false};
  std::string out;
};

int run_split(const SplitOptions & o, const PipelineConfig & config)
{
  auto in = open_in(o.scores);
  const auto scores = read_scores_jsonl(in);
  const std::uint64_t seed = o.seed_set ? o.seed : config.seed;
  SplitAssignment split;
  try {
    if (o.method == "uniform") {
      std::vector<std::string> ids;
      for (const auto & s : scores) {
        ids.push_back(s.scene.scenario_id);
      }
      split = uniform_split(
        ids, {config.split_ratio_train, config.split_ratio_val, config.split_ratio_test}, seed);
    } else {
      std::size_t v = 0;
      while (v < kScoreVariants.size() && to_string(kScoreVariants[v]) != o.variant) {
        ++v;
      }
      if (v == kScoreVariants.size()) {
        throw CLI::ValidationError("unknown score variant '" + o.variant + "'");
      }
      std::vector<std::pair<std::string, double>> rows;
      for (const auto & s : scores) {
        rows.emplace_back(s.scene.scenario_id, s.scene.variants[v]);
      }
      split = scoring_split(rows, config.split_ood_fraction, config.split_val_fraction_of_id, seed);
    }
  } catch (const std::invalid_argument & e) {
    throw DataError(e.what());
  }
  auto out = open_out(o.out);
  write_split_manifest(out, split);
  std::cerr << "train " << split.count(Partition::train) << ", val " << split.count(Partition::val)
            << ", test " << split.count(Partition::test) << '\n';
  return kExitOk;
}

struct EvalOptions
{
  std::string pred;
  std::string scenarios;
  std::string split;
  std::string partition;
  std::string json_out;
};

int run_eval(const EvalOptions & o, const PipelineConfig & config)
{
  const auto scenarios = load_scenarios(o.scenarios);
  std::vector<AgentPrediction> preds;
  if (o.pred == "gt") {
    for (const auto & s : scenarios) {
      auto p = ground_truth_predictions(s);
      preds.insert(preds.end(), p.begin(), p.end());
    }
  } else {
    auto in = open_in(o.pred);
    preds = read_predictions_jsonl(in);
  }
  std::unordered_set<std::string> ids;
  const std::unordered_set<std::string> * filter = nullptr;
  if (!o.split.empty()) {
    if (o.partition.empty()) {
      throw CLI::ValidationError("--split requires --partition");
    }
    ids = load_split(o.split).ids(partition_from_string(o.partition));
    filter = &ids;
  }
  const auto report = evaluate(scenarios, preds, config.cr_mode(), filter);
  std::cout << report.to_table();
  if (!o.json_out.empty()) {
    auto out = open_out(o.json_out);
    out << report.to_json() << '\n';
  } else {
    std::cout << report.to_json() << '\n';
  }
  return kExitOk;
}

struct ReportOptions
{
  std::string kind;
  std::string features;
  std::string variant{"gt"};
  std::string scores;
  std::size_t bins{100};
  std::string out;
  std::string summary;
};

int run_report(const ReportOptions & o)
{
  if (o.kind == "corr") {
    if (o.features.empty()) {
      throw CLI::ValidationError("report corr requires --features");
    }
    const auto sets = read_feature_tables(o.features);
    const auto table = agent_feature_table(sets, o.variant);
    CorrelationResult r;
    try {
      r = correlation_matrix(table.columns, table.names);
    } catch (const std::invalid_argument & e) {
      throw DataError(e.what());
    }
    for (const auto & f : r.flags) {
      std::cerr << "warning: zero-variance column " << f << '\n';
    }
    auto out = open_out(o.out);
    write_correlation_csv(out, r);
    return kExitOk;
  }
  if (o.scores.empty()) {
    throw CLI::ValidationError("report hist requires --scores");
  }
  auto in = open_in(o.scores);
  const auto scores = read_scores_jsonl(in);
  std::vector<Histogram> hists;
  try {
    hists = scene_histograms(scores, o.bins);
  } catch (const std::invalid_argument & e) {
    throw DataError(e.what());
  }
  {
    auto out = open_out(o.out);
    write_histograms_csv(out, hists);
  }
  const auto summary = histogram_summary_json(hists);
  if (!o.summary.empty()) {
    auto out = open_out(o.summary);
    out << summary << '\n';
  } else {
    std::cout << summary << '\n';
  }
  return kExitOk;
}

struct SynthOptions
{
  std::string kind{"random_mix"};
  std::size_t count{100};
  std::uint64_t seed{0};
  std::string out;
};

int run_synth(const SynthOptions & o)
{
  const SynthKind kind = synth_kind_from_string(o.kind);
  std::filesystem::create_directories(o.out);
  const auto path = (std::filesystem::path(o.out) / (o.kind + ".jsonl")).string();
  auto out = open_out(path);
  for (std::size_t k = 0; k < o.count; ++k) {
    out << gen_document(corpus_params(kind, k, o.seed)) << '\n';
  }
  std::cerr << "wrote " << o.count << " scenarios to " << path << '\n';
  return kExitOk;
}

int run_validate(const std::string & path)
{
  std::size_t bad = 0;
  std::size_t total = 0;
  for (const auto & p : load_scenario_dir(path)) {
    ++total;
    for (const auto & w : p.warnings) {
      std::cout << p.scenario.scenario_id << "\twarning\t" << w << '\n';
    }
    const auto report = validate_scenario(p.scenario);
    for (const auto & v : report) {
      std::cout << p.scenario.scenario_id << '\t' << v.code << '\t' << v.detail << '\n';
    }
    bad += report.empty() ? 0 : 1;
  }
  std::cerr << total << " scenarios, " << bad << " with violations\n";
  return bad == 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Safety scenario mining: features, scores, splits and evaluation"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--config", global.config_path, "key=value configuration file");
  app.add_option("--set", global.overrides, "configuration override key=value (repeatable)");
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");

  FeaturesOptions fo;
  auto * features = app.add_subcommand("features", "extract feature tables from scenarios");
  features->add_option("scenarios", fo.scenarios, "scenario file or directory")->required();
  features->add_option("--out", fo.out, "output table directory")->required();
  features->add_option("--fit-split", fo.fit_split, "split manifest restricting the anomaly fit");
  features->add_option("--fit-partition", fo.fit_partition, "partition used for fitting")
    ->check(CLI::IsMember({"train", "val", "test"}));

  ScoreOptions so;
  auto * score = app.add_subcommand("score", "normalize features and score scenarios");
  score->add_option("--features", so.features, "feature table directory")->required();
  score->add_option("--normalizer", so.normalizer_mode, "fit or load")
    ->check(CLI::IsMember({"fit", "load"}));
  score->add_option("--normalizer-file", so.normalizer_file, "normalizer JSON to write or read");
  score->add_option("--out", so.out, "scores JSON-lines file")->required();
  score->add_option("--loss-weights", so.loss_weights, "per-agent loss weight CSV");
  score->add_option("--fit-split", so.fit_split, "split manifest restricting the normalizer fit");
  score->add_option("--fit-partition", so.fit_partition, "partition used for fitting")
    ->check(CLI::IsMember({"train", "val", "test"}));

  SplitOptions sp;
  auto * split = app.add_subcommand("split", "partition scenarios");
  split->add_option("--scores", sp.scores, "scores JSON-lines file")->required();
  split->add_option("--method", sp.method, "uniform or scoring")
    ->check(CLI::IsMember({"uniform", "scoring"}));
  split->add_option("--variant", sp.variant, "scene score variant ranked by the scoring split");
  auto * seed_opt = split->add_option("--seed", sp.seed, "shuffle seed (default: config seed)");
  split->add_option("--out", sp.out, "split manifest")->required();

  EvalOptions eo;
  auto * eval = app.add_subcommand("eval", "evaluate predictions");
  eval->add_option("--pred", eo.pred, "predictions JSON-lines file, or 'gt'")->required();
  eval->add_option("--scenarios", eo.scenarios, "scenario file or directory")->required();
  eval->add_option("--split", eo.split, "split manifest");
  eval->add_option("--partition", eo.partition, "partition to evaluate")
    ->check(CLI::IsMember({"train", "val", "test"}));
  eval->add_option("--json", eo.json_out, "write the JSON report here instead of stdout");

  ReportOptions ro;
  auto * report = app.add_subcommand("report", "correlation and score distribution reports");
  report->add_option("kind", ro.kind, "corr or hist")
    ->required()
    ->check(CLI::IsMember({"corr", "hist"}));
  report->add_option("--features", ro.features, "feature table directory (corr)");
  report->add_option("--variant", ro.variant, "gt or fe (corr)")->check(CLI::IsMember({"gt", "fe"}));
  report->add_option("--scores", ro.scores, "scores JSON-lines file (hist)");
  report->add_option("--bins", ro.bins, "histogram bins (hist)")->check(CLI::PositiveNumber);
  report->add_option("--out", ro.out, "output CSV")->required();
  report->add_option("--summary", ro.summary, "histogram summary JSON (hist)");

  SynthOptions yo;
  auto * synth = app.add_subcommand("synth", "generate synthetic scenarios");
  synth->add_option("--kind", yo.kind, "scenario kind")
    ->check(CLI::IsMember({"leader_follower", "crossing", "cut_in", "random_mix", "stop_and_go"}));
  synth->add_option("--count", yo.count, "number of scenarios");
  synth->add_option("--seed", yo.seed, "corpus seed");
  synth->add_option("--out", yo.out, "output directory")->required();

  std::string validate_path;
  auto * validate = app.add_subcommand("validate", "check scenario documents");
  validate->add_option("scenarios", validate_path, "scenario file or directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto config = load_config(global.config_path, global.overrides);
    if (dump_config) {
      std::cout << config.dump();
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << "a subcommand is required\n" << app.help();
      return kExitUsage;
    }
    if (*features) {
      return run_features(fo, config);
    }
    if (*score) {
      return run_score(so, config);
    }
    if (*split) {
      sp.seed_set = seed_opt->count() > 0;
      return run_split(sp, config);
    }
    if (*eval) {
      return run_eval(eo, config);
    }
    if (*report) {
      return run_report(ro);
    }
    if (*synth) {
      return run_synth(yo);
    }
    if (*validate) {
      return run_validate(validate_path);
    }
  } catch (const CLI::ValidationError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
