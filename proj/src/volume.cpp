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

#include "vacaug/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vacaug {

double log_factorial(std::size_t r) { return std::lgamma(static_cast<double>(r) + 1.0); }

SimplexSelection select_simplex(const Eigen::MatrixXd& points, double rel_tol,
                                std::optional<std::size_t> target_rank) {
  SimplexSelection sel;
  sel.log_volume = -std::numeric_limits<double>::infinity();
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  sel.basis.resize(dim, 0);
  if (n == 0) return sel;

  Eigen::Index anchor = 0;
  {
    double far = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (points.row(i) - points.row(0)).squaredNorm();
      if (d > far) {
        far = d;
        anchor = i;
      }
    }
  }
  sel.vertices.push_back(static_cast<std::size_t>(anchor));

  Eigen::MatrixXd residual = points.rowwise() - points.row(anchor);  // n x dim
  const double scale = residual.rowwise().norm().maxCoeff();
  if (!(scale > 0.0)) return sel;
  const double cutoff = rel_tol * scale;
  const std::size_t max_rank = static_cast<std::size_t>(std::min<Eigen::Index>(dim, n - 1));
  const std::size_t want = target_rank ? std::min(*target_rank, max_rank) : max_rank;

  std::vector<Eigen::VectorXd> basis;
  double log_edges = 0.0;
  while (basis.size() < want) {
    Eigen::Index pick = 0;
    const double best = residual.rowwise().norm().maxCoeff(&pick);
    if (!(best > 0.0)) break;
    if (!target_rank && best <= cutoff) break;
    Eigen::VectorXd q = residual.row(pick).transpose();
    for (const auto& b : basis) q -= b.dot(q) * b;  // re-orthogonalize
    const double qn = q.norm();
    if (!(qn > 0.0)) break;
    q /= qn;
    log_edges += std::log(best);
    residual -= (residual * q) * q.transpose();
    basis.push_back(std::move(q));
    sel.vertices.push_back(static_cast<std::size_t>(pick));
  }

  sel.rank = basis.size();
  sel.basis.resize(dim, static_cast<Eigen::Index>(sel.rank));
  for (std::size_t k = 0; k < sel.rank; ++k) sel.basis.col(static_cast<Eigen::Index>(k)) = basis[k];
  if (sel.rank > 0) sel.log_volume = log_edges - log_factorial(sel.rank);
  return sel;
}

double simplex_volume_gram(const Eigen::MatrixXd& vertices) {
  if (vertices.rows() < 2) throw std::invalid_argument("simplex_volume_gram: need at least two vertices");
  const Eigen::Index r = vertices.rows() - 1;
  // Columns are P_i - P_last, i = 1..r.
  const Eigen::MatrixXd pbar =
      (vertices.topRows(r).rowwise() - vertices.row(r)).transpose();
  // sqrt(det(pbar^T pbar)) = |prod diag(R)| for pbar = QR, without squaring the condition number.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(pbar);
  const Eigen::Index k = std::min<Eigen::Index>(r, pbar.rows());
  if (k < r) return 0.0;
  double root = 1.0;
  for (Eigen::Index i = 0; i < r; ++i) root *= std::abs(qr.matrixQR()(i, i));
  return root / std::exp(log_factorial(static_cast<std::size_t>(r)));
}

}  // namespace vacaug
