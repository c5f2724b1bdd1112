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

#include "vacaug/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "vacaug/errors.hpp"
#include "vacaug/parallel.hpp"
#include "vacaug/physics.hpp"

namespace fs = std::filesystem;

namespace vacaug {

namespace {

constexpr int kMaxShortDraws = 1000;
constexpr double kMinAcceptance = 1e-6;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::string sample_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "aug_%06zu", i);
  return buf;
}

}  // namespace

std::array<double, kFeatureLength> first_minute(const PumpDownCurve& curve) {
  std::array<double, kFeatureLength> out{};
  for (std::size_t k = 0; k < kFeatureLength; ++k) {
    out[k] = curve.pressure_at_time(static_cast<double>(k + 1));
  }
  return out;
}

SparseWeights sample_sparse_weights(std::size_t atom_count, Rng& rng, std::size_t max_nnz) {
  if (atom_count == 0) throw std::invalid_argument("sample_sparse_weights: no atoms");
  SparseWeights w;
  w.weights.assign(atom_count, 0.0);
  const std::size_t cap = std::clamp<std::size_t>(max_nnz, 1, atom_count);
  w.nnz = std::uniform_int_distribution<std::size_t>(1, cap)(rng);

  // Partial Fisher-Yates for nnz distinct indices.
  std::vector<std::size_t> idx(atom_count);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t k = 0; k < w.nnz; ++k) {
    const auto j = std::uniform_int_distribution<std::size_t>(k, atom_count - 1)(rng);
    std::swap(idx[k], idx[j]);
  }
  if (w.nnz == 1) {
    w.weights[idx[0]] = 1.0;
    return w;
  }
  // Lower bound keeps every picked atom strictly nonzero.
  std::uniform_real_distribution<double> draw(1e-3, 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k < w.nnz; ++k) {
    const double v = draw(rng);
    w.weights[idx[k]] = v;
    total += v;
  }
  for (std::size_t k = 0; k < w.nnz; ++k) w.weights[idx[k]] /= total;
  return w;
}

double sample_bounded_scalar(const ScalarDistribution& dist, Rng& rng) {
  const double lo = dist.observed_min;
  const double hi = dist.observed_max;
  if (!(lo <= hi)) throw ValidationError("sample_bounded_scalar: observed_min exceeds observed_max");
  if (dist.std == 0.0 || lo == hi) {
    if (dist.mean < lo || dist.mean > hi) {
      throw ValidationError("sample_bounded_scalar: degenerate distribution outside its bounds");
    }
    return dist.mean;
  }
  const double acceptance =
      normal_cdf((hi - dist.mean) / dist.std) - normal_cdf((lo - dist.mean) / dist.std);
  if (!(acceptance >= kMinAcceptance)) {
    throw ValidationError("sample_bounded_scalar: bounds too far from the mean to sample");
  }
  std::normal_distribution<double> normal(dist.mean, dist.std);
  while (true) {
    const double v = normal(rng);
    if (v >= lo && v <= hi) return v;
  }
}

AugmentedSet generate_augmented(const SpeedDictionary& dict, const ScalarDistribution& p0_dist,
                                const ScalarDistribution& t_dist, const ChamberSpec& chamber,
                                const AugmentOptions& options) {
  if (dict.atoms.empty()) throw ValidationError("generate_augmented: empty dictionary");
  if (options.m == 0) throw ValidationError("generate_augmented: m must be positive");
  chamber.validate();
  if (!(t_dist.observed_max >= static_cast<double>(kFeatureLength))) {
    throw ValidationError("generate_augmented: pump-down times never reach the first minute");
  }
  const std::size_t resolution = dict.resolution;

  AugmentedSet set;
  set.seed = options.seed;
  set.m = options.m;
  set.samples.resize(options.m);
  parallel_for(options.m, options.workers, [&](std::size_t i) {
    Rng rng = make_stream(options.seed, i);
    AugmentedSample s;
    s.weights = sample_sparse_weights(dict.atoms.size(), rng, options.max_nnz);

    std::vector<double> profile(resolution, 0.0);
    for (std::size_t a = 0; a < dict.atoms.size(); ++a) {
      const double w = s.weights.weights[a];
      if (w == 0.0) continue;
      const auto& atom = dict.atoms[a].values;
      for (std::size_t k = 0; k < resolution; ++k) profile[k] += w * atom[k];
    }

    s.p0 = sample_bounded_scalar(p0_dist, rng);
    int rejected = 0;
    do {
      s.pump_down_time = sample_bounded_scalar(t_dist, rng);
      if (s.pump_down_time >= static_cast<double>(kFeatureLength)) break;
      if (++rejected >= kMaxShortDraws) {
        throw ValidationError("generate_augmented: too many pump-down times under 60 s");
      }
    } while (true);

    s.curve = physics::reconstruct_curve(chamber, s.p0, profile,
                                         s.pump_down_time / static_cast<double>(resolution));
    s.curve.event_id = sample_id(i);
    s.min_pressure = s.curve.min_pressure();
    s.first_minute = first_minute(s.curve);
    set.samples[i] = std::move(s);
  });
  return set;
}

void write_augmented(const fs::path& dir, const AugmentedSet& set, const Decomposition& source,
                     const nlohmann::json& extra) {
  fs::create_directories(dir);
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : set.samples) {
    write_curve_csv(dir / (s.curve.event_id + ".csv"), s.curve);
    nlohmann::json nz = nlohmann::json::object();
    for (std::size_t a = 0; a < s.weights.weights.size(); ++a) {
      if (s.weights.weights[a] != 0.0) nz[std::to_string(a)] = s.weights.weights[a];
    }
    samples.push_back({{"id", s.curve.event_id},
                       {"p0", s.p0},
                       {"pump_down_time", s.pump_down_time},
                       {"min_pressure", s.min_pressure},
                       {"weights", std::move(nz)}});
  }
  nlohmann::json manifest = {{"kind", "augmented_set"},
                             {"seed", set.seed},
                             {"m", set.m},
                             {"dictionary_hash", dictionary_hash(source.dictionary)},
                             {"atom_count", source.dictionary.size()},
                             {"p0_dist", source.p0},
                             {"t_dist", source.pump_down_time},
                             {"samples", std::move(samples)},
                             {"created_at", utc_timestamp()}};
  if (extra.is_object()) {
    for (const auto& [k, v] : extra.items()) manifest[k] = v;
  }
  write_json(dir / "augmented_manifest.json", manifest);
}

AugmentedSet load_augmented(const fs::path& dir, const ChamberSpec& chamber) {
  const auto manifest = read_json(dir / "augmented_manifest.json");
  AugmentedSet set;
  set.seed = manifest.at("seed").get<std::uint64_t>();
  set.m = manifest.at("m").get<std::size_t>();
  const auto atom_count = manifest.at("atom_count").get<std::size_t>();
  for (const auto& entry : manifest.at("samples")) {
    AugmentedSample s;
    const auto id = entry.at("id").get<std::string>();
    s.curve = read_curve_csv(dir / (id + ".csv"), chamber);
    s.p0 = entry.at("p0").get<double>();
    s.pump_down_time = entry.at("pump_down_time").get<double>();
    s.weights.weights.assign(atom_count, 0.0);
    for (const auto& [k, v] : entry.at("weights").items()) {
      s.weights.weights.at(std::stoul(k)) = v.get<double>();
      ++s.weights.nnz;
    }
    s.min_pressure = s.curve.min_pressure();
    s.first_minute = first_minute(s.curve);
    set.samples.push_back(std::move(s));
  }
  if (set.samples.size() != set.m) throw ValidationError(dir.string() + ": manifest sample count mismatch");
  return set;
}

}  // namespace vacaug
