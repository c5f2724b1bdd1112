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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacaug/data_io.hpp"
#include "vacaug/decomposition.hpp"
#include "vacaug/external_model.hpp"
#include "vacaug/robustness.hpp"

namespace vacaug {

/// One model under test.
struct ModelSpec {
  std::string name;
  ModelKind kind = ModelKind::kRidge;
  nlohmann::json hyperparams = nlohmann::json::object();
  ExternalEndpoint endpoint;  // kind == kExternal only
};

/// Declarative description of a full run. Every section is optional in the
/// file; missing values keep the defaults below.
struct RunConfig {
  std::filesystem::path gt_dir;
  std::filesystem::path out_dir = "out";
  std::filesystem::path eval_dir;        // optional second furnace for transfer metrics
  std::filesystem::path dictionary;      // default: <out_dir>/dictionary.json
  std::filesystem::path augmented_dir;   // default: <out_dir>/augmented

  ChamberSpec chamber;
  bool chamber_given = false;

  std::size_t resolution = kDefaultResolution;
  double epsilon = kDefaultEpsilon;

  std::size_t m = 2000;
  std::uint64_t augment_seed = 1;
  std::size_t max_nnz = kDefaultMaxNnz;

  std::vector<ModelSpec> models;
  Thresholds thresholds;

  double split_ratio = 0.8;
  std::uint64_t split_seed = 1;
  std::uint64_t train_seed = 1;

  SyntheticCorpusSpec synth;
  std::size_t workers = 1;

  [[nodiscard]] std::filesystem::path dictionary_path() const;
  [[nodiscard]] std::filesystem::path augmented_path() const;
};

/// Parses a config object. Throws ConfigError on unknown keys or bad values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Built-in roster used when the config names no models.
std::vector<ModelSpec> default_models();

nlohmann::json to_json(const RunConfig& c);

}  // namespace vacaug
