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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vacaug {

/// Simplex picked greedily from a point cloud: each new vertex is the point
/// farthest from the affine hull of those already chosen.
struct SimplexSelection {
  std::vector<std::size_t> vertices;  // anchor first
  Eigen::MatrixXd basis;              // ambient x rank, orthonormal
  std::size_t rank = 0;
  /// ln of the r-dimensional simplex volume; -inf when rank == 0.
  double log_volume = 0.0;
};

inline constexpr double kRankTolerance = 1e-10;

/// Greedy max-volume selection over the rows of `points`. The anchor is the
/// point farthest from row 0. Selection stops when the largest remaining
/// distance falls to `rel_tol` times the largest anchor distance, or, when
/// `target_rank` is set, once that many directions are found (ignoring the
/// tolerance).
SimplexSelection select_simplex(const Eigen::MatrixXd& points, double rel_tol = kRankTolerance,
                                std::optional<std::size_t> target_rank = std::nullopt);

/// Volume of the simplex with vertices = rows of `vertices` (r+1 rows) via
/// the Gram determinant: sqrt(det(Pbar^T Pbar)) / r!, with Pbar the
/// differences to the last vertex.
double simplex_volume_gram(const Eigen::MatrixXd& vertices);

/// ln(r!) for the volume normalisation.
double log_factorial(std::size_t r);

}  // namespace vacaug
