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

#include "vacaug/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vacaug {

namespace {

constexpr std::size_t kLeaf = 8;

void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
  if (a.size() != b.size()) throw std::invalid_argument("metric: length mismatch");
  if (a.size() < min_len) throw std::invalid_argument("metric: too few values");
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double metric_mae(std::span<const double> predicted, std::span<const double> actual) {
  check_pair(predicted, actual, 1);
  std::vector<double> abs_err(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) abs_err[i] = std::abs(predicted[i] - actual[i]);
  return pairwise_sum(abs_err) / static_cast<double>(abs_err.size());
}

double metric_r2(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted, 2);
  const double mean = pairwise_sum(actual) / static_cast<double>(actual.size());
  std::vector<double> res(actual.size()), tot(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    res[i] = (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    tot[i] = (actual[i] - mean) * (actual[i] - mean);
  }
  const double ss_tot = pairwise_sum(tot);
  if (std::all_of(actual.begin(), actual.end(), [&](double a) { return a == actual.front(); }) ||
      !(ss_tot > 0.0)) {
    throw std::domain_error("R² undefined: actual values are constant");
  }
  return 1.0 - pairwise_sum(res) / ss_tot;
}

double metric_linf(std::span<const double> predicted, std::span<const double> actual) {
  check_pair(predicted, actual, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) worst = std::max(worst, std::abs(predicted[i] - actual[i]));
  return worst;
}

}  // namespace vacaug
