// Copyright 2026 The vacaug Authors
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

#include "vacaug/pipeline.hpp"

#include <algorithm>
#include <memory>

#include "vacaug/errors.hpp"
#include "vacaug/hash.hpp"
#include "vacaug/metrics.hpp"

namespace fs = std::filesystem;

namespace vacaug::pipeline {

namespace {

void require_chamber(const RunConfig& config) {
  if (!config.chamber_given) throw ConfigError("chamber.volume_m3 must be set in the config");
}

void require_gt_dir(const RunConfig& config) {
  if (config.gt_dir.empty()) throw ConfigError("paths.gt_dir is not set");
  if (!fs::is_directory(config.gt_dir)) {
    throw ConfigError("ground-truth directory does not exist: " + config.gt_dir.string());
  }
}

std::vector<FeatureVector> features_of(const AugmentedSet& aug) {
  std::vector<FeatureVector> f;
  f.reserve(aug.samples.size());
  for (const auto& s : aug.samples) f.push_back(s.first_minute);
  return f;
}

}  // namespace

void synth(const SyntheticCorpusSpec& spec, const fs::path& out_dir, std::ostream& log) {
  const GroundTruthSet gt = generate_synthetic(spec);
  write_curves(out_dir, gt.curves);
  nlohmann::json manifest = {{"kind", "synthetic_ground_truth"},
                             {"spec", spec},
                             {"events", gt.curves.size()},
                             {"created_at", utc_timestamp()}};
  write_json(out_dir / "manifest.json", manifest);
  log << "synth: wrote " << gt.curves.size() << " events to " << out_dir.string() << '\n';
}

Decomposition decompose(const RunConfig& config, std::ostream& log) {
  require_chamber(config);
  require_gt_dir(config);
  const GroundTruthSet gt = load_ground_truth(config.gt_dir, config.chamber, config.workers);
  if (gt.curves.size() < 2) {
    throw ValidationError("decompose: need at least 2 events, found " + std::to_string(gt.curves.size()));
  }
  Decomposition d = vacaug::decompose(gt, config.resolution, config.epsilon, config.workers);
  nlohmann::json j = d;
  j["dictionary_hash"] = dictionary_hash(d.dictionary);
  j["chamber"] = config.chamber;
  write_json(config.dictionary_path(), j);
  log << "decompose: " << gt.curves.size() << " events, " << d.dictionary.size()
      << " atoms, max residual " << d.dictionary.achieved_residual() << " (epsilon " << config.epsilon
      << ")\n"
      << "decompose: P0 " << d.p0.mean << " +- " << d.p0.std << ", T " << d.pump_down_time.mean << " +- "
      << d.pump_down_time.std << '\n';
  return d;
}

AugmentedSet augment(const RunConfig& config, std::ostream& log) {
  require_chamber(config);
  const fs::path dict_path = config.dictionary_path();
  if (!fs::exists(dict_path)) throw ConfigError("dictionary not found: " + dict_path.string());
  Decomposition d;
  try {
    d = read_json(dict_path).get<Decomposition>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(dict_path.string() + ": " + e.what());
  }
  AugmentOptions opt{config.m, config.augment_seed, config.max_nnz, config.workers};
  AugmentedSet aug = generate_augmented(d.dictionary, d.p0, d.pump_down_time, config.chamber, opt);
  write_augmented(config.augmented_path(), aug, d);

  bool bounded = true;
  for (const auto& s : aug.samples) {
    bounded = bounded && s.p0 >= d.p0.observed_min && s.p0 <= d.p0.observed_max &&
              s.pump_down_time >= d.pump_down_time.observed_min &&
              s.pump_down_time <= d.pump_down_time.observed_max;
  }
  log << "augment: m=" << aug.samples.size() << " seed=" << aug.seed << " atoms=" << d.dictionary.size()
      << " bounds " << (bounded ? "honored" : "VIOLATED") << '\n';
  return aug;
}

RobustnessReport test(const RunConfig& config, std::ostream& log) {
  require_chamber(config);
  require_gt_dir(config);
  const fs::path aug_dir = config.augmented_path();
  if (!fs::exists(aug_dir / "augmented_manifest.json")) {
    throw ConfigError("augmented set not found: " + aug_dir.string());
  }
  const GroundTruthSet gt = load_ground_truth(config.gt_dir, config.chamber, config.workers);
  const AugmentedSet aug = load_augmented(aug_dir, config.chamber);
  const auto aug_manifest = read_json(aug_dir / "augmented_manifest.json");
  std::optional<Dataset> transfer_data;
  if (!config.eval_dir.empty()) {
    transfer_data = dataset_from(load_ground_truth(config.eval_dir, config.chamber, config.workers));
  }

  const Dataset gt_all = dataset_from(gt);
  const auto [classic_train, classic_test] = split_classic(gt_all, config.split_ratio, config.split_seed);
  const Dataset aug_data = dataset_from(aug);
  const auto aug_inputs = features_of(aug);
  const auto models = config.models.empty() ? default_models() : config.models;

  RobustnessReport report;
  report.thresholds = config.thresholds;
  report.dictionary_hash = aug_manifest.value("dictionary_hash", std::string{});
  report.seeds = {{"augmentation", aug.seed}, {"split", config.split_seed}, {"train", config.train_seed}};

  for (const auto& spec : models) {
    for (const std::string regime : {"classic", "aug"}) {
      const bool classic = regime == "classic";
      const Dataset& train_set = classic ? classic_train : aug_data;
      const Dataset& test_set = classic ? classic_test : gt_all;

      RegimeReport entry;
      entry.model = spec.name;
      entry.regime = regime;
      entry.kind = to_string(spec.kind);
      entry.test_rows = test_set.size();
      std::unique_ptr<Regressor> model;
      if (spec.kind == ModelKind::kExternal) {
        model = std::make_unique<ExternalModel>(spec.endpoint);
      } else {
        auto trained = train(spec.kind, train_set, spec.hyperparams, config.train_seed, regime);
        entry.hyperparams = trained.hyperparams();
        entry.train_rows = train_set.size();
        model = std::make_unique<TrainedModel>(std::move(trained));
      }

      try {
        const auto aug_pred = model->predict_batch(aug_inputs, config.workers);
        entry.predicted = model->predict_batch(test_set.features, config.workers);
        entry.actual = test_set.targets;
        entry.results.feasibility_pass = scenario_feasibility(aug_pred);
        entry.results.infeasible_count = static_cast<std::size_t>(
            std::count_if(aug_pred.begin(), aug_pred.end(), [](double p) { return !(p > 0.0); }));
        entry.results.metrics = scenario_ground_truth(entry.predicted, test_set.targets, aug_pred, aug);
        entry.results.volume = scenario_volume(aug_pred, aug, config.thresholds.residual_gate);
        if (transfer_data) {
          const auto pred = model->predict_batch(transfer_data->features, config.workers);
          GroundTruthMetrics t;
          t.mae = metric_mae(pred, transfer_data->targets);
          t.r2 = metric_r2(transfer_data->targets, pred);
          t.linf_gt = metric_linf(pred, transfer_data->targets);
          entry.transfer = t;
        }
      } catch (const ProtocolError& e) {
        throw ProtocolError("model '" + spec.name + "': " + e.what());
      }
      entry.verdict = run_oracles(entry.results, config.thresholds);
      log << "test: " << entry.key() << " mae=" << entry.results.metrics.mae
          << " r2=" << entry.results.metrics.r2 << " main=" << (entry.verdict.main ? "pass" : "fail") << '\n';
      report.entries.push_back(std::move(entry));
    }
  }

  std::map<std::string, OracleVerdict> verdicts;
  for (const auto& e : report.entries) verdicts[e.key()] = e.verdict;
  report.ranking = rank_models(verdicts);
  write_report(config.out_dir, report);
  return report;
}

}  // namespace vacaug::pipeline
