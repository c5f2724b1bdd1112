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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacaug/data_io.hpp"

namespace vacaug {

inline constexpr std::size_t kDefaultResolution = 500;
inline constexpr double kDefaultEpsilon = 1e-3;

/// Gaussian fit with the observed range of the data it came from.
struct ScalarDistribution {
  double mean = 0.0;
  double std = 0.0;
  double observed_min = 0.0;
  double observed_max = 0.0;
};

/// Pumping speeds (m^3/s) on a uniform normalized-time grid; entry j covers
/// the interval [j/R, (j+1)/R) of the event.
struct SpeedVector {
  std::vector<double> values;
};

/// Greedily selected, linearly independent subset of training speed vectors.
struct SpeedDictionary {
  std::vector<SpeedVector> atoms;
  std::size_t resolution = kDefaultResolution;
  double epsilon = kDefaultEpsilon;
  /// Largest training residual norm before the first atom and after each
  /// subsequent one. The last entry is the achieved residual.
  std::vector<double> max_residual_history;
  /// Index into the training set of each atom, in selection order.
  std::vector<std::size_t> source_indices;

  [[nodiscard]] std::size_t size() const { return atoms.size(); }
  [[nodiscard]] double achieved_residual() const {
    return max_residual_history.empty() ? 0.0 : max_residual_history.back();
  }
};

/// Mean and population (divide-by-n) standard deviation. Needs >= 2 samples.
ScalarDistribution fit_scalar_mle(std::span<const double> samples);

/// Per-interval effective speeds of `curve`, clamped at zero and resampled by
/// cubic spline onto `resolution` normalized-time interval midpoints.
SpeedVector extract_speed_vector(const PumpDownCurve& curve, std::size_t resolution);

/// Greedy dictionary selection: start from the largest-norm vector, then keep
/// adding the vector whose residual against the span of the chosen atoms is
/// largest until every residual is <= epsilon or no candidates remain.
SpeedDictionary learn_dictionary(std::span<const SpeedVector> speeds, double epsilon);

/// L2 residual of each vector after projection onto span(atoms). Independent
/// of the incremental bookkeeping inside learn_dictionary.
std::vector<double> representation_residuals(std::span<const SpeedVector> atoms,
                                             std::span<const SpeedVector> speeds);

/// Everything augmentation needs from a ground-truth set.
struct Decomposition {
  SpeedDictionary dictionary;
  ScalarDistribution p0;
  ScalarDistribution pump_down_time;
  std::string source_label;
};

Decomposition decompose(const GroundTruthSet& gt, std::size_t resolution = kDefaultResolution,
                        double epsilon = kDefaultEpsilon, std::size_t workers = 1);

void to_json(nlohmann::json& j, const ScalarDistribution& d);
void from_json(const nlohmann::json& j, ScalarDistribution& d);
void to_json(nlohmann::json& j, const Decomposition& d);
void from_json(const nlohmann::json& j, Decomposition& d);

/// Fingerprint of the atoms, resolution and epsilon.
std::string dictionary_hash(const SpeedDictionary& dict);

}  // namespace vacaug
