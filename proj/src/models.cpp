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

#include "vacaug/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "vacaug/errors.hpp"
#include "vacaug/parallel.hpp"
#include "vacaug/rng.hpp"

namespace vacaug {

namespace {

constexpr double kMinLambda = 1e-8;
constexpr std::size_t kFolds = 5;

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureLength));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < kFeatureLength; ++k) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return x;
}

Eigen::VectorXd to_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_length(std::span<const double> features) {
  if (features.size() != kFeatureLength) {
    throw std::invalid_argument("expected " + std::to_string(kFeatureLength) + " features, got " +
                                std::to_string(features.size()));
  }
}

}  // namespace

void Dataset::validate() const {
  if (features.size() != targets.size()) throw ValidationError("dataset: feature/target count mismatch");
  if (targets.empty()) throw ValidationError("dataset: no rows");
}

Dataset dataset_from(const GroundTruthSet& gt) {
  Dataset d;
  for (const auto& c : gt.curves) {
    if (!has_first_minute(c)) continue;
    d.features.push_back(first_minute(c));
    d.targets.push_back(c.min_pressure());
  }
  return d;
}

Dataset dataset_from(const AugmentedSet& aug) {
  Dataset d;
  for (const auto& s : aug.samples) {
    d.features.push_back(s.first_minute);
    d.targets.push_back(s.min_pressure);
  }
  return d;
}

std::pair<Dataset, Dataset> split_classic(const Dataset& data, double ratio, std::uint64_t seed) {
  data.validate();
  if (data.size() < 5) throw ValidationError("split_classic: need at least 5 rows");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split_classic: ratio must be in (0, 1)");
  const std::size_t n = data.size();
  // The epsilon absorbs representation error in products like 0.8 * 10.
  const auto n_train = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
  if (n_train == 0 || n_train >= n) throw ValidationError("split_classic: split leaves one side empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_stream(seed, 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::pair<Dataset, Dataset> out;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& side = i < n_train ? out.first : out.second;
    side.features.push_back(data.features[order[i]]);
    side.targets.push_back(data.targets[order[i]]);
  }
  return out;
}

std::vector<double> Regressor::predict_batch(std::span<const FeatureVector> inputs,
                                             std::size_t workers) const {
  std::vector<double> out(inputs.size());
  parallel_for(inputs.size(), workers, [&](std::size_t i) { out[i] = predict(inputs[i]); });
  return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double var = (x.col(c).array() - mean).square().sum() / n;
    const double scale = std::sqrt(var);
    s.mean.push_back(mean);
    s.scale.push_back(scale > 0.0 ? scale : 1.0);
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = x;
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    z.col(c) = (z.col(c).array() - mean[k]) / scale[k];
  }
  return z;
}

Eigen::RowVectorXd Standardizer::apply(std::span<const double> row) const {
  Eigen::RowVectorXd z(static_cast<Eigen::Index>(row.size()));
  for (std::size_t k = 0; k < row.size(); ++k) z(static_cast<Eigen::Index>(k)) = (row[k] - mean[k]) / scale[k];
  return z;
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd x = z;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    x.col(c) = x.col(c).array() * scale[k] + mean[k];
  }
  return x;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRidge: return "ridge";
    case ModelKind::kKnn: return "knn";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kExternal: return "external";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "ridge") return ModelKind::kRidge;
  if (name == "knn") return ModelKind::kKnn;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "external") return ModelKind::kExternal;
  throw ConfigError("unknown model kind '" + name + "'");
}

TrainedModel::TrainedModel(ModelKind kind, Parameters params, Standardizer standardizer,
                           std::string label, nlohmann::json hyperparams)
    : kind_(kind),
      params_(std::move(params)),
      standardizer_(std::move(standardizer)),
      label_(std::move(label)),
      hyperparams_(std::move(hyperparams)) {}

namespace {

double predict_ridge(const RidgeParams& p, const Eigen::RowVectorXd& z) {
  return z.dot(p.weights) + p.intercept;
}

double predict_knn(const KnnParams& p, const Eigen::RowVectorXd& z) {
  const Eigen::Index n = p.points.rows();
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = {(p.points.row(i) - z).squaredNorm(), i};
  }
  const auto k = std::min<std::size_t>(p.k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += p.targets(dist[i].second);
  return sum / static_cast<double>(k);
}

double predict_mlp(const MlpParams& p, const Eigen::RowVectorXd& z) {
  const Eigen::VectorXd hidden = (p.w1 * z.transpose() + p.b1).cwiseMax(0.0);
  return (hidden.dot(p.w2) + p.b2) * p.target_scale + p.target_mean;
}

}  // namespace

double TrainedModel::predict(std::span<const double> features) const {
  check_length(features);
  const Eigen::RowVectorXd z = standardizer_.apply(features);
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RidgeParams>) return predict_ridge(p, z);
        else if constexpr (std::is_same_v<T, KnnParams>) return predict_knn(p, z);
        else return predict_mlp(p, z);
      },
      params_);
}

namespace mlp {

std::vector<double> flatten(const MlpParams& p) {
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(p.w1.size() + p.b1.size() + p.w2.size() + 1));
  for (Eigen::Index r = 0; r < p.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.w1.cols(); ++c) theta.push_back(p.w1(r, c));
  }
  for (Eigen::Index r = 0; r < p.b1.size(); ++r) theta.push_back(p.b1(r));
  for (Eigen::Index r = 0; r < p.w2.size(); ++r) theta.push_back(p.w2(r));
  theta.push_back(p.b2);
  return theta;
}

MlpParams unflatten(std::span<const double> theta, int inputs) {
  const std::size_t expected = static_cast<std::size_t>(kMlpHidden * inputs + 2 * kMlpHidden + 1);
  if (theta.size() != expected) throw std::invalid_argument("mlp::unflatten: wrong parameter count");
  MlpParams p;
  p.w1.resize(kMlpHidden, inputs);
  p.b1.resize(kMlpHidden);
  p.w2.resize(kMlpHidden);
  std::size_t k = 0;
  for (int r = 0; r < kMlpHidden; ++r) {
    for (int c = 0; c < inputs; ++c) p.w1(r, c) = theta[k++];
  }
  for (int r = 0; r < kMlpHidden; ++r) p.b1(r) = theta[k++];
  for (int r = 0; r < kMlpHidden; ++r) p.w2(r) = theta[k++];
  p.b2 = theta[k];
  return p;
}

double loss_and_gradient(std::span<const double> theta, const Eigen::MatrixXd& z,
                         const Eigen::VectorXd& y, double weight_decay, std::vector<double>* grad) {
  const auto inputs = static_cast<int>(z.cols());
  const MlpParams p = unflatten(theta, inputs);
  const double n = static_cast<double>(z.rows());

  const Eigen::MatrixXd pre = (z * p.w1.transpose()).rowwise() + p.b1.transpose();  // n x h
  const Eigen::MatrixXd act = pre.cwiseMax(0.0);
  const Eigen::VectorXd out = (act * p.w2).array() + p.b2;
  const Eigen::VectorXd err = out - y;
  const double loss = 0.5 * err.squaredNorm() / n +
                      0.5 * weight_decay * (p.w1.squaredNorm() + p.w2.squaredNorm());
  if (grad == nullptr) return loss;

  const Eigen::VectorXd d_out = err / n;
  MlpParams g;
  g.w2 = act.transpose() * d_out + weight_decay * p.w2;
  g.b2 = d_out.sum();
  const Eigen::MatrixXd d_pre =
      ((d_out * p.w2.transpose()).array() * (pre.array() > 0.0).cast<double>()).matrix();
  g.w1 = d_pre.transpose() * z + weight_decay * p.w1;
  g.b1 = d_pre.colwise().sum().transpose();
  *grad = flatten(g);
  return loss;
}

}  // namespace mlp

namespace {

struct Prepared {
  Standardizer standardizer;
  Eigen::MatrixXd z;
  Eigen::VectorXd y;
};

Prepared prepare(const Dataset& data) {
  const Eigen::MatrixXd x = to_matrix(data.features);
  Prepared p;
  p.standardizer = Standardizer::fit(x);
  p.z = p.standardizer.apply(x);
  p.y = to_vector(data.targets);
  return p;
}

RidgeParams fit_ridge(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double lambda) {
  // minimize 1/(2n) ||z w + b - y||^2 + lambda/2 ||w||^2; columns of z are
  // centered on the training mean so b is the target mean.
  const double n = static_cast<double>(z.rows());
  RidgeParams p;
  p.lambda = std::max(lambda, kMinLambda);
  p.intercept = y.mean();
  const Eigen::VectorXd yc = y.array() - p.intercept;
  const Eigen::VectorXd zc_mean = z.colwise().mean().transpose();
  const Eigen::MatrixXd zc = z.rowwise() - zc_mean.transpose();
  Eigen::MatrixXd a = zc.transpose() * zc / n;
  a.diagonal().array() += p.lambda;
  const Eigen::VectorXd rhs = zc.transpose() * yc / n;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  p.weights = ldlt.solve(rhs);
  p.weights += ldlt.solve(rhs - a * p.weights);  // one refinement step
  p.intercept -= zc_mean.dot(p.weights);
  return p;
}

KnnParams fit_knn(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, std::size_t k) {
  if (k == 0) throw ConfigError("knn: k must be positive");
  return KnnParams{k, z, y};
}

struct MlpOptions {
  double learning_rate = 1e-2;
  int epochs = 300;
  int batch_size = 32;
  double weight_decay = 1e-4;
};

MlpParams fit_mlp(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const MlpOptions& opt,
                  std::uint64_t seed) {
  const auto inputs = static_cast<int>(z.cols());
  const Eigen::Index n = z.rows();
  Rng rng = make_stream(seed, 0x6d6c70);

  MlpParams init;
  init.target_mean = y.mean();
  const double spread = std::sqrt((y.array() - init.target_mean).square().mean());
  init.target_scale = spread > 0.0 ? spread : 1.0;
  init.weight_decay = opt.weight_decay;
  const Eigen::VectorXd ys = (y.array() - init.target_mean) / init.target_scale;

  std::normal_distribution<double> he(0.0, std::sqrt(2.0 / inputs));
  std::normal_distribution<double> he_out(0.0, std::sqrt(2.0 / kMlpHidden));
  init.w1.resize(kMlpHidden, inputs);
  for (Eigen::Index i = 0; i < init.w1.size(); ++i) init.w1.data()[i] = he(rng);
  init.b1 = Eigen::VectorXd::Constant(kMlpHidden, 0.01);
  init.w2.resize(kMlpHidden);
  for (int i = 0; i < kMlpHidden; ++i) init.w2(i) = he_out(rng);
  init.b2 = 0.0;

  std::vector<double> theta = mlp::flatten(init);
  std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0), grad;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<Eigen::Index>(std::max(1, opt.batch_size));
  long step = 0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      Eigen::MatrixXd zb(len, z.cols());
      Eigen::VectorXd yb(len);
      for (Eigen::Index r = 0; r < len; ++r) {
        const auto src = order[static_cast<std::size_t>(start + r)];
        zb.row(r) = z.row(src);
        yb(r) = ys(src);
      }
      mlp::loss_and_gradient(theta, zb, yb, opt.weight_decay, &grad);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * grad[i];
        m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        theta[i] -= opt.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + kEps);
      }
    }
  }
  MlpParams out = mlp::unflatten(theta, inputs);
  out.target_mean = init.target_mean;
  out.target_scale = init.target_scale;
  out.weight_decay = opt.weight_decay;
  return out;
}

MlpOptions mlp_options(const nlohmann::json& hp) {
  MlpOptions o;
  o.learning_rate = hp.value("learning_rate", o.learning_rate);
  o.epochs = hp.value("epochs", o.epochs);
  o.batch_size = hp.value("batch_size", o.batch_size);
  o.weight_decay = hp.value("weight_decay", o.weight_decay);
  return o;
}

TrainedModel::Parameters fit_params(ModelKind kind, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                    const nlohmann::json& hp, std::uint64_t seed) {
  switch (kind) {
    case ModelKind::kRidge: return fit_ridge(z, y, hp.value("lambda", 1e-2));
    case ModelKind::kKnn: return fit_knn(z, y, hp.value("k", std::size_t{5}));
    case ModelKind::kMlp: return fit_mlp(z, y, mlp_options(hp), seed);
    case ModelKind::kExternal: break;
  }
  throw ConfigError("external models are not trained by this harness");
}

// Candidate values for the one tuned hyperparameter of each kind.
std::pair<std::string, std::vector<double>> search_grid(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRidge: return {"lambda", {1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}};
    case ModelKind::kKnn: return {"k", {1, 3, 5, 7, 11, 15}};
    case ModelKind::kMlp: return {"learning_rate", {3e-3, 1e-2, 3e-2}};
    case ModelKind::kExternal: break;
  }
  return {};
}

nlohmann::json grid_search(ModelKind kind, const Dataset& data, nlohmann::json hp, std::uint64_t seed) {
  const auto [key, grid] = search_grid(kind);
  const std::size_t n = data.size();
  const std::size_t folds = std::min(kFolds, n);
  if (folds < 2) return hp;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_stream(seed, 0x63760000);
  std::shuffle(order.begin(), order.end(), rng);

  double best_mae = std::numeric_limits<double>::infinity();
  double best = grid.front();
  for (const double candidate : grid) {
    nlohmann::json trial = hp;
    if (kind == ModelKind::kKnn) trial[key] = static_cast<std::size_t>(candidate);
    else trial[key] = candidate;
    double abs_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      Dataset fit, held;
      for (std::size_t i = 0; i < n; ++i) {
        Dataset& side = (i % folds == f) ? held : fit;
        side.features.push_back(data.features[order[i]]);
        side.targets.push_back(data.targets[order[i]]);
      }
      const Prepared p = prepare(fit);
      const TrainedModel m(kind, fit_params(kind, p.z, p.y, trial, seed), p.standardizer, "cv", trial);
      for (std::size_t i = 0; i < held.size(); ++i) {
        abs_sum += std::abs(m.predict(held.features[i]) - held.targets[i]);
      }
    }
    const double mae = abs_sum / static_cast<double>(n);
    if (mae < best_mae) {
      best_mae = mae;
      best = candidate;
    }
  }
  if (kind == ModelKind::kKnn) hp[key] = static_cast<std::size_t>(best);
  else hp[key] = best;
  hp["cv_mae"] = best_mae;
  return hp;
}

}  // namespace

TrainedModel train(ModelKind kind, const Dataset& data, const nlohmann::json& hyperparams,
                   std::uint64_t seed, const std::string& training_label) {
  data.validate();
  if (kind == ModelKind::kExternal) throw ConfigError("external models are not trained by this harness");
  nlohmann::json hp = hyperparams.is_object() ? hyperparams : nlohmann::json::object();
  if (hp.value("grid_search", false)) hp = grid_search(kind, data, hp, seed);
  const Prepared p = prepare(data);
  auto params = fit_params(kind, p.z, p.y, hp, seed);
  return TrainedModel(kind, std::move(params), p.standardizer, training_label, std::move(hp));
}

void to_json(nlohmann::json& j, const TrainedModel& m) {
  j = {{"kind", m.kind_name()},
       {"training_label", m.training_label()},
       {"hyperparams", m.hyperparams()},
       {"standardization", {{"mean", m.standardizer().mean}, {"scale", m.standardizer().scale}}}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RidgeParams>) {
          j["parameters"] = {{"lambda", p.lambda},
                             {"intercept", p.intercept},
                             {"weights", std::vector<double>(p.weights.begin(), p.weights.end())}};
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          j["parameters"] = {{"k", p.k}, {"training_rows", p.points.rows()}};
        } else {
          j["parameters"] = {{"theta", mlp::flatten(p)},
                             {"target_mean", p.target_mean},
                             {"target_scale", p.target_scale}};
        }
      },
      m.parameters());
}

}  // namespace vacaug
