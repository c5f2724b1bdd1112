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

#include <span>

namespace vacaug {

/// Fixed-shape pairwise (cascade) summation. The reduction tree depends only
/// on the length, so results do not change with how inputs were produced.
double pairwise_sum(std::span<const double> values);

/// sum |p - a| / n. Throws std::invalid_argument on empty or mismatched input.
double metric_mae(std::span<const double> predicted, std::span<const double> actual);

/// 1 - SS_res / SS_tot. Throws std::domain_error ("R² undefined") when
/// `actual` is constant, std::invalid_argument on n < 2 or mismatch.
double metric_r2(std::span<const double> actual, std::span<const double> predicted);

/// max |p - a|.
double metric_linf(std::span<const double> predicted, std::span<const double> actual);

}  // namespace vacaug
