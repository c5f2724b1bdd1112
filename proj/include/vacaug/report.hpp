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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacaug/robustness.hpp"

namespace vacaug {

/// One (model, regime) evaluation.
struct RegimeReport {
  std::string model;
  std::string regime;  // "classic" or "aug"
  std::string kind;
  nlohmann::json hyperparams = nlohmann::json::object();
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  ScenarioResults results;
  OracleVerdict verdict;
  std::optional<GroundTruthMetrics> transfer;  // metrics on a second furnace, if given
  std::vector<double> actual;                  // ground-truth test targets
  std::vector<double> predicted;

  [[nodiscard]] std::string key() const { return model + " (" + regime + ")"; }
};

struct RobustnessReport {
  std::vector<RegimeReport> entries;
  Thresholds thresholds;
  std::string dictionary_hash;
  nlohmann::json seeds = nlohmann::json::object();
  std::vector<RankedModel> ranking;
};

nlohmann::json to_json(const RobustnessReport& r);

/// report.json plus plots/<model>_<regime>.csv with actual,predicted pairs.
void write_report(const std::filesystem::path& out_dir, const RobustnessReport& r);

/// Human-readable summary of a serialized report.
void print_report(const nlohmann::json& report, std::ostream& out);

}  // namespace vacaug
