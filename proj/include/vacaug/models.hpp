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
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "vacaug/augmentation.hpp"
#include "vacaug/data_io.hpp"

namespace vacaug {

using FeatureVector = std::array<double, kFeatureLength>;

/// Features are first-minute pressures, targets the event's minimum pressure.
struct Dataset {
  std::vector<FeatureVector> features;
  std::vector<double> targets;

  [[nodiscard]] std::size_t size() const { return targets.size(); }
  void validate() const;
};

/// Events that end before t = 60 s have no complete first minute and are
/// skipped, matching the rule for augmented samples.
Dataset dataset_from(const GroundTruthSet& gt);
Dataset dataset_from(const AugmentedSet& aug);

/// Shuffles by `seed` and puts the first ceil(ratio*n) rows in train.
std::pair<Dataset, Dataset> split_classic(const Dataset& data, double ratio, std::uint64_t seed);

/// Anything that maps a 60-sample feature vector to a pressure.
class Regressor {
 public:
  virtual ~Regressor() = default;
  [[nodiscard]] virtual std::string kind_name() const = 0;
  /// Throws std::invalid_argument unless features.size() == 60.
  [[nodiscard]] virtual double predict(std::span<const double> features) const = 0;
  /// Order-preserving; the default fans predict() out over `workers` threads.
  [[nodiscard]] virtual std::vector<double> predict_batch(std::span<const FeatureVector> inputs,
                                                          std::size_t workers = 1) const;
};

/// Per-dimension z-scoring fitted on training data. Zero spread maps to 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Eigen::MatrixXd& x);
  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  [[nodiscard]] Eigen::RowVectorXd apply(std::span<const double> row) const;
  [[nodiscard]] Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
};

enum class ModelKind { kRidge, kKnn, kMlp, kExternal };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct RidgeParams {
  double lambda = 0.0;
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

struct KnnParams {
  std::size_t k = 5;
  Eigen::MatrixXd points;  // standardized training rows
  Eigen::VectorXd targets;
};

inline constexpr int kMlpHidden = 10;

struct MlpParams {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;
  double target_mean = 0.0;
  double target_scale = 1.0;
  double weight_decay = 0.0;
};

/// A built-in model fitted by train().
class TrainedModel final : public Regressor {
 public:
  using Parameters = std::variant<RidgeParams, KnnParams, MlpParams>;

  TrainedModel(ModelKind kind, Parameters params, Standardizer standardizer, std::string label,
               nlohmann::json hyperparams);

  [[nodiscard]] std::string kind_name() const override { return to_string(kind_); }
  [[nodiscard]] double predict(std::span<const double> features) const override;

  [[nodiscard]] ModelKind kind() const { return kind_; }
  [[nodiscard]] const Parameters& parameters() const { return params_; }
  [[nodiscard]] const Standardizer& standardizer() const { return standardizer_; }
  [[nodiscard]] const std::string& training_label() const { return label_; }
  /// Hyperparameters actually used (after any grid search).
  [[nodiscard]] const nlohmann::json& hyperparams() const { return hyperparams_; }

 private:
  ModelKind kind_;
  Parameters params_;
  Standardizer standardizer_;
  std::string label_;
  nlohmann::json hyperparams_;
};

/// Fits a built-in model. Recognised hyperparameters:
///   ridge: lambda (default 1e-2, floored at 1e-8)
///   knn:   k (default 5)
///   mlp:   learning_rate (1e-2), epochs (300), batch_size (32), weight_decay (1e-4)
///   all:   grid_search (false) - picks lambda / k / learning_rate by 5-fold CV MAE
TrainedModel train(ModelKind kind, const Dataset& data, const nlohmann::json& hyperparams,
                   std::uint64_t seed, const std::string& training_label = "classic");

namespace mlp {

/// Flattened parameter layout: w1 (row-major), b1, w2, b2.
std::vector<double> flatten(const MlpParams& p);
MlpParams unflatten(std::span<const double> theta, int inputs);

/// Mean half-squared error of the network on standardized (z, y) plus
/// weight_decay/2 * ||w1, w2||^2. Writes d(loss)/d(theta) into `grad` if set.
double loss_and_gradient(std::span<const double> theta, const Eigen::MatrixXd& z,
                         const Eigen::VectorXd& y, double weight_decay, std::vector<double>* grad);

}  // namespace mlp

void to_json(nlohmann::json& j, const TrainedModel& m);

}  // namespace vacaug
