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

#include "vacaug/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vacaug/errors.hpp"
#include "vacaug/metrics.hpp"
#include "vacaug/volume.hpp"

namespace vacaug {

namespace {

std::vector<double> aug_targets(const AugmentedSet& aug) {
  std::vector<double> t(aug.samples.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = aug.samples[i].min_pressure;
  return t;
}

std::vector<FeatureVector> aug_features(const AugmentedSet& aug) {
  std::vector<FeatureVector> f(aug.samples.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = aug.samples[i].first_minute;
  return f;
}

}  // namespace

void Thresholds::validate() const {
  for (const double v : {mae_max, r2_min, linf_max, residual_gate, t_v, v_min}) {
    if (!std::isfinite(v)) throw ConfigError("thresholds must be finite");
  }
  if (!(mae_max > 0.0)) throw ConfigError("mae_max must be positive");
  if (!(linf_max > 0.0)) throw ConfigError("linf_max must be positive");
  if (!(residual_gate > 0.0)) throw ConfigError("residual_gate must be positive");
}

double VolumeResult::v_t() const { return std::exp(log_v_t); }
double VolumeResult::v_tot() const { return std::exp(log_v_tot); }

bool scenario_feasibility(std::span<const double> aug_predictions) {
  return std::all_of(aug_predictions.begin(), aug_predictions.end(), [](double p) { return p > 0.0; });
}

bool scenario_feasibility(const Regressor& model, const AugmentedSet& aug, std::size_t workers) {
  if (aug.samples.empty()) throw ValidationError("feasibility scenario: empty augmented set");
  const auto features = aug_features(aug);
  return scenario_feasibility(model.predict_batch(features, workers));
}

GroundTruthMetrics scenario_ground_truth(std::span<const double> gt_predictions,
                                         std::span<const double> gt_targets,
                                         std::span<const double> aug_predictions,
                                         const AugmentedSet& aug) {
  if (gt_targets.empty()) throw ValidationError("ground-truth scenario: empty test set");
  GroundTruthMetrics m;
  m.mae = metric_mae(gt_predictions, gt_targets);
  m.r2 = metric_r2(gt_targets, gt_predictions);
  m.linf_gt = metric_linf(gt_predictions, gt_targets);
  const auto targets = aug_targets(aug);
  m.linf_aug = targets.empty() ? 0.0 : metric_linf(aug_predictions, targets);
  return m;
}

GroundTruthMetrics scenario_ground_truth(const Regressor& model, const Dataset& gt_test,
                                         const AugmentedSet& aug, std::size_t workers) {
  gt_test.validate();
  const auto gt_pred = model.predict_batch(gt_test.features, workers);
  const auto aug_pred = model.predict_batch(aug_features(aug), workers);
  return scenario_ground_truth(gt_pred, gt_test.targets, aug_pred, aug);
}

VolumeResult scenario_volume(std::span<const double> aug_predictions, const AugmentedSet& aug,
                             double residual_gate) {
  if (aug.samples.empty()) throw ValidationError("volume scenario: empty augmented set");
  if (aug_predictions.size() != aug.samples.size()) {
    throw std::invalid_argument("volume scenario: prediction count mismatch");
  }
  const auto n = static_cast<Eigen::Index>(aug.samples.size());
  const auto dim = static_cast<Eigen::Index>(kFeatureLength);
  Eigen::MatrixXd all(n, dim);
  std::vector<Eigen::Index> gated;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = aug.samples[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < dim; ++k) all(i, k) = s.first_minute[static_cast<std::size_t>(k)];
    if (std::abs(aug_predictions[static_cast<std::size_t>(i)] - s.min_pressure) < residual_gate) {
      gated.push_back(i);
    }
  }

  VolumeResult out;
  out.gated = gated.size();
  out.log_v_t = -std::numeric_limits<double>::infinity();
  out.log_v_tot = -std::numeric_limits<double>::infinity();
  if (gated.size() < 2) return out;

  Eigen::MatrixXd g(static_cast<Eigen::Index>(gated.size()), dim);
  for (std::size_t k = 0; k < gated.size(); ++k) g.row(static_cast<Eigen::Index>(k)) = all.row(gated[k]);
  const SimplexSelection inner = select_simplex(g);
  out.d_effective = inner.rank;
  if (inner.rank == 0) return out;
  out.log_v_t = inner.log_volume;

  // All points expressed in the gated simplex's r-dimensional affine frame.
  const Eigen::RowVectorXd origin = g.row(static_cast<Eigen::Index>(inner.vertices.front()));
  const Eigen::MatrixXd projected = (all.rowwise() - origin) * inner.basis;
  const SimplexSelection outer = select_simplex(projected, kRankTolerance, inner.rank);
  if (outer.rank == inner.rank) out.log_v_tot = outer.log_volume;
  return out;
}

VolumeResult scenario_volume(const Regressor& model, const AugmentedSet& aug, double residual_gate,
                             std::size_t workers) {
  const auto features = aug_features(aug);
  return scenario_volume(model.predict_batch(features, workers), aug, residual_gate);
}

ScenarioResults evaluate_model(const Regressor& model, const Dataset& gt_test, const AugmentedSet& aug,
                               double residual_gate, std::size_t workers) {
  gt_test.validate();
  if (aug.samples.empty()) throw ValidationError("evaluation: empty augmented set");
  const auto aug_pred = model.predict_batch(aug_features(aug), workers);
  const auto gt_pred = model.predict_batch(gt_test.features, workers);
  ScenarioResults r;
  r.feasibility_pass = scenario_feasibility(aug_pred);
  r.infeasible_count = static_cast<std::size_t>(
      std::count_if(aug_pred.begin(), aug_pred.end(), [](double p) { return !(p > 0.0); }));
  r.metrics = scenario_ground_truth(gt_pred, gt_test.targets, aug_pred, aug);
  r.volume = scenario_volume(aug_pred, aug, residual_gate);
  return r;
}

OracleVerdict run_oracles(const ScenarioResults& results, const Thresholds& thresholds) {
  OracleVerdict v;
  v.oracle1 = results.feasibility_pass;
  const auto& m = results.metrics;
  // Low error passes: MAE and l-inf at or under their limits, R² at or over.
  v.oracle2 = m.mae <= thresholds.mae_max && m.r2 >= thresholds.r2_min &&
              std::max(m.linf_gt, m.linf_aug) <= thresholds.linf_max;
  const double log_vt = results.volume.log_v_t;
  if (thresholds.volume_mode == VolumeMode::kRatio) {
    const double log_vtot = results.volume.log_v_tot;
    const bool defined = std::isfinite(log_vtot);
    v.oracle3 = defined && (thresholds.t_v <= 0.0 || log_vt - log_vtot >= std::log(thresholds.t_v));
  } else {
    v.oracle3 = thresholds.v_min <= 0.0 || log_vt >= std::log(thresholds.v_min);
  }
  v.main = v.oracle1 && v.oracle2 && v.oracle3;
  v.log_ranking_volume = log_vt;
  v.ranking_volume = results.volume.v_t();
  return v;
}

std::vector<RankedModel> rank_models(const std::map<std::string, OracleVerdict>& verdicts) {
  std::vector<RankedModel> passed, failed;
  for (const auto& [name, v] : verdicts) (v.main ? passed : failed).push_back({name, v, 0});
  // std::map iteration is already name-ordered, so a stable sort keeps name as
  // the tie-break.
  std::stable_sort(passed.begin(), passed.end(), [](const RankedModel& a, const RankedModel& b) {
    return a.verdict.log_ranking_volume > b.verdict.log_ranking_volume;
  });
  for (std::size_t i = 0; i < passed.size(); ++i) passed[i].rank = static_cast<int>(i + 1);
  passed.insert(passed.end(), failed.begin(), failed.end());
  return passed;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

void to_json(nlohmann::json& j, const Thresholds& t) {
  j = {{"mae_max", t.mae_max},
       {"r2_min", t.r2_min},
       {"linf_max", t.linf_max},
       {"residual_gate", t.residual_gate},
       {"volume_mode", t.volume_mode == VolumeMode::kRatio ? "ratio" : "absolute"},
       {"t_v", t.t_v},
       {"v_min", t.v_min}};
}

void from_json(const nlohmann::json& j, Thresholds& t) {
  static const std::vector<std::string> kKeys = {"mae_max", "r2_min", "linf_max", "residual_gate",
                                                 "volume_mode", "t_v", "v_min"};
  for (const auto& [k, _] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) {
      throw ConfigError("thresholds: unknown key '" + k + "'");
    }
  }
  t.mae_max = j.value("mae_max", t.mae_max);
  t.r2_min = j.value("r2_min", t.r2_min);
  t.linf_max = j.value("linf_max", t.linf_max);
  t.residual_gate = j.value("residual_gate", t.residual_gate);
  t.t_v = j.value("t_v", t.t_v);
  t.v_min = j.value("v_min", t.v_min);
  if (j.contains("volume_mode")) {
    const auto mode = j.at("volume_mode").get<std::string>();
    if (mode == "ratio") t.volume_mode = VolumeMode::kRatio;
    else if (mode == "absolute") t.volume_mode = VolumeMode::kAbsolute;
    else throw ConfigError("thresholds: volume_mode must be 'ratio' or 'absolute'");
  }
  t.validate();
}

void to_json(nlohmann::json& j, const ScenarioResults& r) {
  const auto& v = r.volume;
  j = {{"feasibility_pass", r.feasibility_pass},
       {"infeasible_count", r.infeasible_count},
       {"mae", r.metrics.mae},
       {"r2", r.metrics.r2},
       {"linf_gt", r.metrics.linf_gt},
       {"linf_aug", r.metrics.linf_aug},
       {"v_t", v.v_t()},
       {"v_tot", v.v_tot()},
       {"log10_v_t", finite_or_null(v.log_v_t / std::log(10.0))},
       {"log10_v_tot", finite_or_null(v.log_v_tot / std::log(10.0))},
       {"d_effective", v.d_effective},
       {"gated_samples", v.gated}};
}

void to_json(nlohmann::json& j, const OracleVerdict& v) {
  auto word = [](bool b) { return b ? "pass" : "fail"; };
  j = {{"oracle1", word(v.oracle1)},
       {"oracle2", word(v.oracle2)},
       {"oracle3", word(v.oracle3)},
       {"main", word(v.main)},
       {"ranking_volume", v.ranking_volume},
       {"log10_ranking_volume", finite_or_null(v.log_ranking_volume / std::log(10.0))}};
}

}  // namespace vacaug
