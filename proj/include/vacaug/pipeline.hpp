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
#include <ostream>

#include "vacaug/config.hpp"
#include "vacaug/report.hpp"

namespace vacaug::pipeline {

/// Writes a synthetic ground-truth corpus plus manifest.json into `out_dir`.
void synth(const SyntheticCorpusSpec& spec, const std::filesystem::path& out_dir, std::ostream& log);

/// Fits distributions and the speed dictionary; writes the dictionary JSON.
Decomposition decompose(const RunConfig& config, std::ostream& log);

/// Generates the augmented set from the dictionary on disk.
AugmentedSet augment(const RunConfig& config, std::ostream& log);

/// Trains every model in the classic and aug regimes, runs the three
/// scenarios and the oracles, and writes report.json and plot CSVs.
/// Model failures are report content; only an external model's protocol
/// failure aborts (ProtocolError naming the model).
RobustnessReport test(const RunConfig& config, std::ostream& log);

}  // namespace vacaug::pipeline
