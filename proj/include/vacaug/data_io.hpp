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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "vacaug/curve.hpp"

namespace vacaug {

/// A set of recorded pumping events from one chamber.
struct GroundTruthSet {
  std::vector<PumpDownCurve> curves;
  std::string label;

  /// Checks every curve plus the shared-volume rule; throws ValidationError.
  void validate(std::size_t min_events = 1) const;
};

/// Parameters of a synthetic corpus standing in for recorded furnace data.
struct SyntheticCorpusSpec {
  std::size_t n_events = 200;
  double p0_mean = 1000.0;
  double p0_std = 16.84;
  double t_mean = 333.59;
  double t_std = 262.52;
  ChamberSpec chamber;
  std::size_t speed_archetypes = 3;
  double noise_rel = 0.0;
  double sample_interval_s = 1.0;
  std::uint64_t seed = 0;
  std::string label = "synthetic";

  void validate() const;
};

void to_json(nlohmann::json& j, const ChamberSpec& c);
void from_json(const nlohmann::json& j, ChamberSpec& c);
void to_json(nlohmann::json& j, const SyntheticCorpusSpec& s);

/// Shortest pump-down time the generator emits.
inline constexpr double kMinSyntheticPumpDownTime = 30.0;

/// Pumping speed (m^3/s) of archetype `index` at normalized times `u` in
/// [0, 1]: a logistic decay from a high initial speed to a low floor.
std::vector<double> synthetic_archetype(std::size_t index, std::span<const double> u,
                                        const ChamberSpec& chamber);

/// Deterministic synthetic corpus; one RNG stream per event.
GroundTruthSet generate_synthetic(const SyntheticCorpusSpec& spec);

/// Rounds to the 9-significant-digit decimal form used on disk.
double quantize_decimal(double value);
std::string format_decimal(double value);

/// Writes `time_s,pressure_mbar` CSV.
void write_curve_csv(const std::filesystem::path& path, const PumpDownCurve& curve);

/// Parses one event file. Throws ParseError / ValidationError naming file:line.
PumpDownCurve read_curve_csv(const std::filesystem::path& path, const ChamberSpec& chamber);

/// Loads every `*.csv` in `dir` (sorted by file name) as one event each.
GroundTruthSet load_ground_truth(const std::filesystem::path& dir, const ChamberSpec& chamber,
                                 std::size_t workers = 1);

/// Writes one CSV per curve (`<event_id>.csv`) into `dir`, creating it.
void write_curves(const std::filesystem::path& dir, std::span<const PumpDownCurve> curves);

/// Current UTC time, ISO-8601. Only manifests' `created_at` carries it.
std::string utc_timestamp();

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace vacaug
