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
#include <vector>

namespace vacaug {

/// Natural cubic spline through (x, y) with strictly increasing x. Queries
/// outside [x.front(), x.back()] extend the end segments' cubics.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y);

  [[nodiscard]] double operator()(double t) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

/// Evaluates y(x) on `grid`: natural cubic spline when there are at least three
/// knots, piecewise-linear for two, constant for one.
std::vector<double> resample(std::span<const double> x, std::span<const double> y,
                             std::span<const double> grid);

}  // namespace vacaug
