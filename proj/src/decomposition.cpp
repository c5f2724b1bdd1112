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

#include "vacaug/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "vacaug/errors.hpp"
#include "vacaug/hash.hpp"
#include "vacaug/parallel.hpp"
#include "vacaug/physics.hpp"
#include "vacaug/spline.hpp"

namespace vacaug {

ScalarDistribution fit_scalar_mle(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("fit_scalar_mle: need at least two samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : samples) ss += (v - mean) * (v - mean);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  // Rounding can put the mean of identical values a hair outside their range.
  return {std::clamp(mean, *lo, *hi), std::sqrt(ss / n), *lo, *hi};
}

SpeedVector extract_speed_vector(const PumpDownCurve& curve, std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("extract_speed_vector: resolution must be >= 2");
  curve.validate();
  const std::size_t intervals = curve.size() - 1;
  const double total = curve.pump_down_time();
  std::vector<double> knots(intervals);
  std::vector<double> speeds(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    const double t0 = curve.times_s[k];
    const double t1 = curve.times_s[k + 1];
    knots[k] = 0.5 * (t0 + t1) / total;
    speeds[k] = std::max(0.0, physics::effective_speed(curve.chamber, curve.pressures_mbar[k],
                                                       curve.pressures_mbar[k + 1], t1 - t0));
  }
  std::vector<double> grid(resolution);
  for (std::size_t j = 0; j < resolution; ++j) {
    grid[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(resolution);
  }
  SpeedVector out{resample(knots, speeds, grid)};
  for (auto& v : out.values) v = std::max(0.0, v);
  return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Removes the component along unit vector q.
void deflate(std::vector<double>& r, std::span<const double> q) {
  const double c = dot(r, q);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * q[k];
}

}  // namespace

SpeedDictionary learn_dictionary(std::span<const SpeedVector> speeds, double epsilon) {
  if (speeds.empty()) throw std::invalid_argument("learn_dictionary: no speed vectors");
  if (!(epsilon > 0.0)) throw std::invalid_argument("learn_dictionary: epsilon must be positive");
  const std::size_t dim = speeds.front().values.size();
  for (const auto& s : speeds) {
    if (s.values.size() != dim) throw std::invalid_argument("learn_dictionary: ragged speed vectors");
  }

  SpeedDictionary dict;
  dict.resolution = dim;
  dict.epsilon = epsilon;

  // residuals[i] = S_i minus its projection on the span of the chosen atoms;
  // basis holds that span orthonormalized (the normalized greedy projection).
  std::vector<std::vector<double>> residuals;
  residuals.reserve(speeds.size());
  for (const auto& s : speeds) residuals.push_back(s.values);
  std::vector<std::vector<double>> basis;
  std::vector<bool> chosen(speeds.size(), false);

  while (true) {
    double max_norm = -1.0;
    std::size_t pick = speeds.size();
    double max_any = 0.0;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      const double r = norm(residuals[i]);
      max_any = std::max(max_any, r);
      if (!chosen[i] && r > max_norm) {
        max_norm = r;
        pick = i;
      }
    }
    dict.max_residual_history.push_back(max_any);
    if (pick == speeds.size()) break;
    if (!dict.atoms.empty() && max_any <= epsilon) break;

    chosen[pick] = true;
    dict.atoms.push_back(speeds[pick]);
    dict.source_indices.push_back(pick);
    if (max_norm > 0.0) {
      std::vector<double> q = residuals[pick];
      // Two Gram-Schmidt passes keep the basis orthogonal to working precision.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) deflate(q, b);
      }
      const double qn = norm(q);
      if (qn > 0.0) {
        for (auto& v : q) v /= qn;
        for (auto& r : residuals) deflate(r, q);
        basis.push_back(std::move(q));
      }
    }
    std::fill(residuals[pick].begin(), residuals[pick].end(), 0.0);
  }
  return dict;
}

std::vector<double> representation_residuals(std::span<const SpeedVector> atoms,
                                             std::span<const SpeedVector> speeds) {
  std::vector<double> out(speeds.size(), 0.0);
  if (speeds.empty()) return out;
  const auto dim = static_cast<Eigen::Index>(speeds.front().values.size());
  if (atoms.empty()) {
    for (std::size_t i = 0; i < speeds.size(); ++i) out[i] = norm(speeds[i].values);
    return out;
  }
  Eigen::MatrixXd a(dim, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(atoms[j].values.data(), dim);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> s(speeds[i].values.data(), dim);
    const Eigen::VectorXd coef = qr.solve(s);
    out[i] = (s - a * coef).norm();
  }
  return out;
}

Decomposition decompose(const GroundTruthSet& gt, std::size_t resolution, double epsilon,
                        std::size_t workers) {
  gt.validate(2);
  std::vector<double> p0(gt.curves.size());
  std::vector<double> times(gt.curves.size());
  std::vector<SpeedVector> speeds(gt.curves.size());
  parallel_for(gt.curves.size(), workers, [&](std::size_t i) {
    p0[i] = gt.curves[i].initial_pressure();
    times[i] = gt.curves[i].pump_down_time();
    speeds[i] = extract_speed_vector(gt.curves[i], resolution);
  });
  Decomposition d;
  d.p0 = fit_scalar_mle(p0);
  d.pump_down_time = fit_scalar_mle(times);
  d.dictionary = learn_dictionary(speeds, epsilon);
  d.source_label = gt.label;
  return d;
}

void to_json(nlohmann::json& j, const ScalarDistribution& d) {
  j = {{"mean", d.mean}, {"std", d.std}, {"observed_min", d.observed_min}, {"observed_max", d.observed_max}};
}

void from_json(const nlohmann::json& j, ScalarDistribution& d) {
  d.mean = j.at("mean").get<double>();
  d.std = j.at("std").get<double>();
  d.observed_min = j.at("observed_min").get<double>();
  d.observed_max = j.at("observed_max").get<double>();
}

void to_json(nlohmann::json& j, const Decomposition& d) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : d.dictionary.atoms) atoms.push_back(a.values);
  j = {{"resolution", d.dictionary.resolution},
       {"epsilon", d.dictionary.epsilon},
       {"atoms", std::move(atoms)},
       {"source_indices", d.dictionary.source_indices},
       {"max_residual_history", d.dictionary.max_residual_history},
       {"source_label", d.source_label},
       {"p0_dist", d.p0},
       {"t_dist", d.pump_down_time}};
}

void from_json(const nlohmann::json& j, Decomposition& d) {
  d.dictionary.resolution = j.at("resolution").get<std::size_t>();
  d.dictionary.epsilon = j.at("epsilon").get<double>();
  d.dictionary.atoms.clear();
  for (const auto& a : j.at("atoms")) {
    SpeedVector v{a.get<std::vector<double>>()};
    if (v.values.size() != d.dictionary.resolution) {
      throw ValidationError("dictionary atom length does not match resolution");
    }
    if (std::any_of(v.values.begin(), v.values.end(), [](double x) { return !(x >= 0.0); })) {
      throw ValidationError("dictionary atom has a negative entry");
    }
    d.dictionary.atoms.push_back(std::move(v));
  }
  if (d.dictionary.atoms.empty()) throw ValidationError("dictionary has no atoms");
  d.dictionary.source_indices = j.value("source_indices", std::vector<std::size_t>{});
  d.dictionary.max_residual_history = j.value("max_residual_history", std::vector<double>{});
  d.source_label = j.value("source_label", std::string{});
  d.p0 = j.at("p0_dist").get<ScalarDistribution>();
  d.pump_down_time = j.at("t_dist").get<ScalarDistribution>();
}

std::string dictionary_hash(const SpeedDictionary& dict) {
  nlohmann::json j = {{"resolution", dict.resolution}, {"epsilon", dict.epsilon}};
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : dict.atoms) atoms.push_back(a.values);
  j["atoms"] = std::move(atoms);
  return hex64(fnv1a64(j.dump()));
}

}  // namespace vacaug
