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

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacaug/augmentation.hpp"
#include "vacaug/models.hpp"

namespace vacaug {

enum class VolumeMode { kRatio, kAbsolute };

/// Pass/fail limits for the sub-oracles.
struct Thresholds {
  double mae_max = 1.5;         // mbar
  double r2_min = 0.8;
  double linf_max = 25.0;       // mbar
  double residual_gate = 1.0;   // mbar, per-sample gate for the volume scenario
  VolumeMode volume_mode = VolumeMode::kAbsolute;
  double t_v = 1e-3;            // ratio mode: minimum V_t / V_tot
  double v_min = 1.0e-35;       // absolute mode: minimum V_t

  void validate() const;
};

struct GroundTruthMetrics {
  double mae = 0.0;
  double r2 = 0.0;
  double linf_gt = 0.0;
  double linf_aug = 0.0;
};

struct VolumeResult {
  double log_v_t = 0.0;    // natural log; -inf for an empty/degenerate gate
  double log_v_tot = 0.0;
  std::size_t d_effective = 0;
  std::size_t gated = 0;   // samples under the residual gate

  [[nodiscard]] double v_t() const;
  [[nodiscard]] double v_tot() const;
};

struct ScenarioResults {
  bool feasibility_pass = false;
  std::size_t infeasible_count = 0;
  GroundTruthMetrics metrics;
  VolumeResult volume;
};

struct OracleVerdict {
  bool oracle1 = false;
  bool oracle2 = false;
  bool oracle3 = false;
  bool main = false;
  double ranking_volume = 0.0;      // V_t; meaningful only when main passes
  double log_ranking_volume = 0.0;  // ln V_t, used for ordering
};

/// True iff every prediction is strictly positive.
bool scenario_feasibility(std::span<const double> aug_predictions);
bool scenario_feasibility(const Regressor& model, const AugmentedSet& aug, std::size_t workers = 1);

GroundTruthMetrics scenario_ground_truth(std::span<const double> gt_predictions,
                                         std::span<const double> gt_targets,
                                         std::span<const double> aug_predictions,
                                         const AugmentedSet& aug);
GroundTruthMetrics scenario_ground_truth(const Regressor& model, const Dataset& gt_test,
                                         const AugmentedSet& aug, std::size_t workers = 1);

/// Gated samples are those with |prediction - min_pressure| < residual_gate.
/// V_t is the greedy simplex volume of their first-minute points; V_tot that
/// of all augmented points projected on the gated points' affine basis.
VolumeResult scenario_volume(std::span<const double> aug_predictions, const AugmentedSet& aug,
                             double residual_gate);
VolumeResult scenario_volume(const Regressor& model, const AugmentedSet& aug, double residual_gate,
                             std::size_t workers = 1);

/// Runs all three scenarios with one pass of predictions per data set.
ScenarioResults evaluate_model(const Regressor& model, const Dataset& gt_test, const AugmentedSet& aug,
                               double residual_gate, std::size_t workers = 1);

OracleVerdict run_oracles(const ScenarioResults& results, const Thresholds& thresholds);

struct RankedModel {
  std::string name;
  OracleVerdict verdict;
  int rank = 0;  // 1-based among passing models; 0 when the main oracle failed
};

/// Passing models by descending V_t (ties by name), then failures by name.
std::vector<RankedModel> rank_models(const std::map<std::string, OracleVerdict>& verdicts);

void to_json(nlohmann::json& j, const Thresholds& t);
void from_json(const nlohmann::json& j, Thresholds& t);
void to_json(nlohmann::json& j, const ScenarioResults& r);
void to_json(nlohmann::json& j, const OracleVerdict& v);

}  // namespace vacaug
