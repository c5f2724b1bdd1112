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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "vacaug/decomposition.hpp"
#include "vacaug/rng.hpp"

namespace vacaug {

inline constexpr std::size_t kFeatureLength = 60;
inline constexpr std::size_t kDefaultMaxNnz = 3;

/// Mixing weights on the probability simplex over dictionary atoms.
struct SparseWeights {
  std::vector<double> weights;
  std::size_t nnz = 0;
};

/// True when the curve covers t = 60 s.
inline bool has_first_minute(const PumpDownCurve& curve) {
  return curve.pump_down_time() >= static_cast<double>(kFeatureLength);
}

/// Pressures at t = 1..60 s of a curve.
std::array<double, kFeatureLength> first_minute(const PumpDownCurve& curve);

struct AugmentedSample {
  PumpDownCurve curve;
  SparseWeights weights;
  double p0 = 0.0;
  double pump_down_time = 0.0;
  double min_pressure = 0.0;
  std::array<double, kFeatureLength> first_minute{};
};

struct AugmentedSet {
  std::vector<AugmentedSample> samples;
  std::uint64_t seed = 0;
  std::size_t m = 0;
};

/// Picks nnz uniformly from 1..min(max_nnz, atom_count), that many distinct
/// atoms, and normalized uniform weights on them.
SparseWeights sample_sparse_weights(std::size_t atom_count, Rng& rng,
                                    std::size_t max_nnz = kDefaultMaxNnz);

/// Truncated Gaussian by rejection inside [observed_min, observed_max]. Throws
/// ValidationError when the acceptance probability is below 1e-6.
double sample_bounded_scalar(const ScalarDistribution& dist, Rng& rng);

struct AugmentOptions {
  std::size_t m = 2000;
  std::uint64_t seed = 0;
  std::size_t max_nnz = kDefaultMaxNnz;
  std::size_t workers = 1;
};

/// Draws a sample for every index in [0, m) from its own RNG stream, so the
/// result is independent of `workers`.
AugmentedSet generate_augmented(const SpeedDictionary& dict, const ScalarDistribution& p0_dist,
                                const ScalarDistribution& t_dist, const ChamberSpec& chamber,
                                const AugmentOptions& options);

/// Writes `<dir>/<id>.csv` per sample and `<dir>/augmented_manifest.json`.
void write_augmented(const std::filesystem::path& dir, const AugmentedSet& set,
                     const Decomposition& source, const nlohmann::json& extra = {});

/// Reads a directory written by write_augmented.
AugmentedSet load_augmented(const std::filesystem::path& dir, const ChamberSpec& chamber);

}  // namespace vacaug
