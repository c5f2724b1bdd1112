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
// Acceptance checks. One line per criterion; exit status is non-zero when any
// criterion fails, except those named with --known-failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vacaug/augmentation.hpp"
#include "vacaug/decomposition.hpp"
#include "vacaug/errors.hpp"
#include "vacaug/external_model.hpp"
#include "vacaug/metrics.hpp"
#include "vacaug/models.hpp"
#include "vacaug/physics.hpp"
#include "vacaug/robustness.hpp"
#include "vacaug/volume.hpp"

namespace {

using namespace vacaug;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kRoundtripRelTol = 1e-9;
constexpr double kRoundtripSeconds = 1.0;
constexpr double kAsymptoteRelTol = 1e-6;
constexpr double kDictEpsilon = 1e-3;
constexpr double kDictSeconds = 10.0;
constexpr double kSimplexTol = 1e-12;
constexpr double kMetricTol = 1e-12;
constexpr double kGramRelTol = 1e-10;
constexpr double kScaleLogTol = 1e-9;
constexpr double kGradRelTol = 1e-5;
constexpr double kGradStep = 1e-5;
constexpr int kDirectionWinsNeeded = 8;
constexpr double kDirectionSeconds = 300.0;
constexpr double kDirectionNoise = 0.001;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome physics_roundtrip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> vol(0.1, 100.0), speed(1e-3, 10.0), p0(1.0, 2000.0), tau(1e-3, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    ChamberSpec c;
    c.volume_m3 = vol(rng);
    const double s = speed(rng);
    const double p = p0(rng);
    // T spans 1e-3 to 50 time constants so P_T stays representable.
    const double t = tau(rng) * c.volume_m3 / s;
    const double got = physics::effective_speed(c, p, physics::pressure_at(c, p, s, t), t);
    worst = std::max(worst, std::abs(got - s) / s);
  }
  const double secs = seconds_since(t0);
  return {worst < kRoundtripRelTol && secs < kRoundtripSeconds,
          fmt("max rel err %.3g (< %.0e), %.3f s (< %.0f s)", worst, kRoundtripRelTol, secs, kRoundtripSeconds)};
}

Outcome physics_asymptote() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> vol(0.1, 100.0), speed(1e-3, 10.0), p0(1.0, 2000.0), frac(0.0, 0.99);
  double worst = 0.0;
  int non_monotone = 0;
  for (int i = 0; i < 1000; ++i) {
    ChamberSpec c;
    c.volume_m3 = vol(rng);
    const double s = speed(rng);
    const double p = p0(rng);
    c.leak_flow = frac(rng) * p * s;
    const double tc = c.volume_m3 / s;
    double last = p;
    for (int k = 1; k <= 25; ++k) {
      const double now = physics::pressure_at(c, p, s, 0.25 * k * tc);
      if (!(now < last)) ++non_monotone;
      last = now;
    }
    const double far = physics::pressure_at(c, p, s, 1e6 * tc);
    worst = std::max(worst, std::abs(far - c.total_flow() / s) / p);
  }
  return {worst < kAsymptoteRelTol && non_monotone == 0,
          fmt("max |P(inf) - Q/S| / P0 = %.3g (< %.0e), %d non-decreasing steps", worst, kAsymptoteRelTol,
              non_monotone)};
}

Outcome dictionary_learning() {
  SyntheticCorpusSpec spec;
  spec.n_events = 200;
  spec.speed_archetypes = 3;
  spec.noise_rel = 0.0;
  spec.seed = 103;
  const auto gt = generate_synthetic(spec);
  const auto t0 = Clock::now();
  std::vector<SpeedVector> speeds;
  for (const auto& c : gt.curves) speeds.push_back(extract_speed_vector(c, kDefaultResolution));
  const auto dict = learn_dictionary(speeds, kDictEpsilon);
  const double secs = seconds_since(t0);
  // Exact duplicates among the inputs.
  std::set<std::vector<double>> distinct;
  for (const auto& s : speeds) distinct.insert(s.values);
  const std::size_t duplicates = speeds.size() - distinct.size();
  const std::size_t cap = 3 * (1 + duplicates);
  const auto residuals = representation_residuals(dict.atoms, speeds);
  const double worst = *std::max_element(residuals.begin(), residuals.end());
  bool monotone = true;
  for (std::size_t i = 1; i < dict.max_residual_history.size(); ++i) {
    monotone = monotone && dict.max_residual_history[i] <= dict.max_residual_history[i - 1];
  }
  return {dict.size() <= cap && worst <= kDictEpsilon && monotone && secs < kDictSeconds,
          fmt("%zu atoms (cap %zu), max residual %.3g (<= %.0e), history %s, %.2f s (< %.0f s)", dict.size(), cap,
              worst, kDictEpsilon, monotone ? "non-increasing" : "INCREASING", secs, kDictSeconds)};
}

Decomposition acceptance_decomposition(std::uint64_t seed, double noise) {
  SyntheticCorpusSpec spec;
  spec.n_events = 200;
  spec.noise_rel = noise;
  spec.seed = seed;
  return decompose(generate_synthetic(spec), kDefaultResolution, kDefaultEpsilon, 0);
}

Outcome augmentation_invariants() {
  const auto d = acceptance_decomposition(104, 0.002);
  AugmentOptions opt;
  opt.m = 2000;
  opt.seed = 104;
  opt.workers = 1;
  const auto serial = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  opt.workers = 8;
  const auto parallel = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  std::size_t bad = 0;
  double worst_sum = 0.0;
  bool identical = serial.samples.size() == parallel.samples.size();
  for (std::size_t i = 0; i < serial.samples.size(); ++i) {
    const auto& s = serial.samples[i];
    const auto& p = s.curve.pressures_mbar;
    bad += std::any_of(p.begin(), p.end(), [](double v) { return !(v > 0.0); });
    bad += s.p0 < d.p0.observed_min || s.p0 > d.p0.observed_max;
    bad += s.pump_down_time < d.pump_down_time.observed_min || s.pump_down_time > d.pump_down_time.observed_max;
    bad += std::any_of(s.weights.weights.begin(), s.weights.weights.end(), [](double w) { return w < 0.0; });
    double sum = 0.0;
    for (double w : s.weights.weights) sum += w;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const auto& q = parallel.samples[i];
    identical = identical && p == q.curve.pressures_mbar && s.curve.times_s == q.curve.times_s &&
                s.weights.weights == q.weights.weights && s.p0 == q.p0 && s.first_minute == q.first_minute;
  }
  return {serial.samples.size() == 2000 && bad == 0 && worst_sum <= kSimplexTol && identical,
          fmt("m=%zu, %zu violations, max |sum(psi) - 1| %.3g (<= %.0e), 1 vs 8 workers %s", serial.samples.size(),
              bad, worst_sum, kSimplexTol, identical ? "bit-identical" : "DIFFER")};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<int> len(2, 500);
  std::normal_distribution<double> g(100.0, 40.0);
  double worst = 0.0;
  bool mae_le_linf = true;
  bool identities = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> a(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g(rng);
      p[i] = g(rng);
    }
    long double abs_sum = 0.0L, res = 0.0L, tot = 0.0L, mean = 0.0L, worst_abs = 0.0L;
    for (std::size_t i = 0; i < n; ++i) mean += a[i];
    mean /= n;
    for (std::size_t i = 0; i < n; ++i) {
      const long double e = static_cast<long double>(p[i]) - a[i];
      abs_sum += std::fabs(e);
      worst_abs = std::max(worst_abs, std::fabs(e));
      res += e * e;
      tot += (a[i] - mean) * (a[i] - mean);
    }
    const double mae = metric_mae(p, a);
    const double linf = metric_linf(p, a);
    worst = std::max(worst, std::abs(mae - static_cast<double>(abs_sum / n)) / std::max(1.0, mae));
    worst = std::max(worst, std::abs(metric_r2(a, p) - static_cast<double>(1.0L - res / tot)));
    worst = std::max(worst, std::abs(linf - static_cast<double>(worst_abs)));
    mae_le_linf = mae_le_linf && mae <= linf;
    identities = identities && metric_r2(a, a) == 1.0;
    const std::vector<double> flat(n, static_cast<double>(mean));
    identities = identities && std::abs(metric_r2(a, flat)) <= kMetricTol;
  }
  return {worst <= kMetricTol && mae_le_linf && identities,
          fmt("max deviation from naive loops %.3g (<= %.0e), R2 identities %s, MAE <= linf %s", worst, kMetricTol,
              identities ? "hold" : "BROKEN", mae_le_linf ? "holds" : "BROKEN")};
}

Outcome simplex_volume() {
  std::mt19937_64 rng(106);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 7;
    Eigen::MatrixXd p(d + 1, d);
    for (int i = 0; i <= d; ++i) {
      for (int k = 0; k < d; ++k) p(i, k) = g(rng);
    }
    const Eigen::MatrixXd diff = p.topRows(d).rowwise() - p.row(d);
    const double oracle = std::abs(diff.determinant()) / std::tgamma(d + 1.0);
    worst = std::max(worst, std::abs(simplex_volume_gram(p) - oracle) / oracle);
  }
  Eigen::MatrixXd tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  const double unit = simplex_volume_gram(tri);
  Eigen::MatrixXd cloud(15, 6);
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    for (Eigen::Index k = 0; k < cloud.cols(); ++k) cloud(i, k) = g(rng);
  }
  const auto base = select_simplex(cloud);
  double scale_err = 0.0;
  for (double c : {0.1, 2.0, 7.5}) {
    const auto s = select_simplex(cloud * c);
    scale_err = std::max(scale_err, std::abs(s.log_volume - base.log_volume - base.rank * std::log(c)));
  }
  return {worst <= kGramRelTol && unit == 0.5 && scale_err <= kScaleLogTol,
          fmt("Gram vs det max rel err %.3g (<= %.0e), unit triangle %.17g, scaling log err %.3g (<= %.0e)", worst,
              kGramRelTol, unit, scale_err, kScaleLogTol)};
}

Outcome oracle_truth_table() {
  const Thresholds t;
  int wrong = 0;
  for (int mask = 0; mask < 8; ++mask) {
    ScenarioResults r;
    r.feasibility_pass = mask & 1;
    r.metrics = (mask & 2) ? GroundTruthMetrics{0.5, 0.95, 3.0, 4.0} : GroundTruthMetrics{9.0, 0.2, 30.0, 60.0};
    r.volume.log_v_t = std::log((mask & 4) ? 1e-20 : 1e-40);
    const auto v = run_oracles(r, t);
    wrong += v.main != (v.oracle1 && v.oracle2 && v.oracle3);
    wrong += v.oracle1 != bool(mask & 1) || v.oracle2 != bool(mask & 2) || v.oracle3 != bool(mask & 4);
  }
  ScenarioResults fixture;
  fixture.feasibility_pass = true;
  fixture.metrics = {1.0, 0.98, 22.12, 22.12};
  fixture.volume.log_v_t = std::log(7.48e-21);
  const auto v = run_oracles(fixture, t);
  const bool fixture_pass = v.oracle1 && v.oracle2 && v.oracle3 && v.main;
  return {wrong == 0 && fixture_pass,
          fmt("%d wrong rows of 8, fixture (1.0, 0.98, 22.12, 7.48e-21) %s", wrong, fixture_pass ? "passes" : "FAILS")};
}

class FnModel final : public Regressor {
 public:
  explicit FnModel(std::function<double(std::span<const double>)> fn) : fn_(std::move(fn)) {}
  [[nodiscard]] std::string kind_name() const override { return "rigged"; }
  [[nodiscard]] double predict(std::span<const double> f) const override { return fn_(f); }

 private:
  std::function<double(std::span<const double>)> fn_;
};

Outcome feasibility_detection() {
  const auto d = acceptance_decomposition(108, 0.002);
  AugmentOptions opt;
  opt.m = 2000;
  opt.seed = 108;
  opt.workers = 0;
  const auto aug = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  const auto target = aug.samples[1234].first_minute;
  const FnModel negative_once([&](std::span<const double> f) {
    return std::equal(f.begin(), f.end(), target.begin()) ? -1.0 : 1.0;
  });
  const FnModel positive([](std::span<const double>) { return 1.0; });
  const Thresholds t;
  ScenarioResults rn, rp;
  rn.feasibility_pass = scenario_feasibility(negative_once, aug, 4);
  rp.feasibility_pass = scenario_feasibility(positive, aug, 4);
  const bool ok = !run_oracles(rn, t).oracle1 && run_oracles(rp, t).oracle1;
  return {ok, fmt("one negative of %zu: oracle1 %s; always positive: oracle1 %s", aug.samples.size(),
                  rn.feasibility_pass ? "pass" : "fail", rp.feasibility_pass ? "pass" : "fail")};
}

Outcome aug_vs_classic() {
  const auto t0 = Clock::now();
  int mae_wins = 0;
  int volume_wins = 0;
  const Thresholds thresholds;
  const nlohmann::json hp = {{"grid_search", true}};
  std::string per_rep;
  for (int rep = 0; rep < 10; ++rep) {
    SyntheticCorpusSpec m_spec;
    m_spec.n_events = 200;
    m_spec.noise_rel = kDirectionNoise;
    m_spec.seed = 1000 + static_cast<std::uint64_t>(rep);
    m_spec.label = "furnace-M-analog";
    SyntheticCorpusSpec s_spec = m_spec;
    s_spec.n_events = 100;
    s_spec.seed = 5000 + static_cast<std::uint64_t>(rep);
    s_spec.label = "furnace-S-analog";
    const auto gt_m = generate_synthetic(m_spec);
    const auto furnace_s = dataset_from(generate_synthetic(s_spec));
    const auto d = decompose(gt_m, kDefaultResolution, kDefaultEpsilon, 0);
    AugmentOptions opt;
    opt.m = 2000;
    opt.seed = 77 + static_cast<std::uint64_t>(rep);
    opt.workers = 0;
    const auto aug = generate_augmented(d.dictionary, d.p0, d.pump_down_time, m_spec.chamber, opt);
    const auto [classic_train, classic_test] = split_classic(dataset_from(gt_m), 0.8, 31 + static_cast<std::uint64_t>(rep));
    const auto classic = train(ModelKind::kRidge, classic_train, hp, 1, "classic");
    const auto augm = train(ModelKind::kRidge, dataset_from(aug), hp, 1, "aug");
    const double mae_c = metric_mae(classic.predict_batch(furnace_s.features, 0), furnace_s.targets);
    const double mae_a = metric_mae(augm.predict_batch(furnace_s.features, 0), furnace_s.targets);
    const auto vol_c = scenario_volume(classic, aug, thresholds.residual_gate, 0);
    const auto vol_a = scenario_volume(augm, aug, thresholds.residual_gate, 0);
    mae_wins += mae_a <= mae_c;
    volume_wins += vol_a.log_v_t > vol_c.log_v_t;
    per_rep += fmt("\n      rep %d: MAE aug %.3f vs classic %.3f; log10 v_t aug %.2f vs classic %.2f", rep, mae_a,
                   mae_c, vol_a.log_v_t / std::log(10.0), vol_c.log_v_t / std::log(10.0));
  }
  const double secs = seconds_since(t0);
  return {mae_wins >= kDirectionWinsNeeded && volume_wins >= kDirectionWinsNeeded && secs < kDirectionSeconds,
          fmt("aug MAE <= classic in %d/10, aug v_t > classic in %d/10 (need %d each), %.1f s (< %.0f s)", mae_wins,
              volume_wins, kDirectionWinsNeeded, secs, kDirectionSeconds) +
              per_rep};
}

Outcome mlp_gradient() {
  std::mt19937_64 rng(110);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd z(5, static_cast<Eigen::Index>(kFeatureLength));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index k = 0; k < z.cols(); ++k) z(i, k) = g(rng);
  }
  Eigen::VectorXd y(5);
  for (Eigen::Index i = 0; i < 5; ++i) y(i) = g(rng);
  std::vector<double> theta(static_cast<std::size_t>(kMlpHidden) * (kFeatureLength + 2) + 1);
  for (auto& t : theta) t = 0.3 * g(rng);
  std::vector<double> grad;
  mlp::loss_and_gradient(theta, z, y, 1e-4, &grad);
  double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto plus = theta, minus = theta;
    plus[i] += kGradStep;
    minus[i] -= kGradStep;
    const double numeric = (mlp::loss_and_gradient(plus, z, y, 1e-4, nullptr) -
                            mlp::loss_and_gradient(minus, z, y, 1e-4, nullptr)) /
                           (2.0 * kGradStep);
    diff += (numeric - grad[i]) * (numeric - grad[i]);
    norm_a += grad[i] * grad[i];
    norm_n += numeric * numeric;
  }
  const double rel = std::sqrt(diff) / std::max(std::sqrt(norm_a), std::sqrt(norm_n));
  return {rel < kGradRelTol, fmt("relative error %.3g over %zu parameters (< %.0e)", rel, theta.size(), kGradRelTol)};
}

Outcome external_protocol() {
  ExternalEndpoint echo;
  echo.command = {VACAUG_ECHO_MODEL};
  FeatureVector seven{};
  seven.fill(1.0);
  seven[0] = 7.0;
  const bool conformance = ExternalModel(echo).predict(seven) == 7.0;

  ExternalEndpoint dying;
  dying.command = {VACAUG_ECHO_MODEL, "--exit-after", "3"};
  std::vector<FeatureVector> inputs(2000);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i].fill(0.5);
    inputs[i][0] = static_cast<double>(i);
  }
  bool orderly = false;
  try {
    external_predict_batch(dying, inputs);
  } catch (const ProtocolError&) {
    orderly = true;
  }

  ExternalEndpoint reversing;
  reversing.command = {VACAUG_ECHO_MODEL, "--reverse"};
  const auto out = external_predict_batch(reversing, inputs);
  bool ordered = out.size() == inputs.size();
  for (std::size_t i = 0; ordered && i < out.size(); ++i) ordered = out[i] == static_cast<double>(i);
  return {conformance && orderly && ordered,
          fmt("echo 7 -> 7 %s, process death %s, 2000 inputs %s", conformance ? "ok" : "WRONG",
              orderly ? "raises ProtocolError" : "NOT DETECTED", ordered ? "in order" : "OUT OF ORDER")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_failures;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--known-failure") known_failures.insert(std::atoi(argv[++i]));
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"physics roundtrip", physics_roundtrip},
      {"pressure asymptote and monotonicity", physics_asymptote},
      {"dictionary learning", dictionary_learning},
      {"augmentation invariants", augmentation_invariants},
      {"metric oracles", metric_oracles},
      {"simplex volume", simplex_volume},
      {"oracle truth table", oracle_truth_table},
      {"feasibility detection", feasibility_detection},
      {"aug vs classic direction", aug_vs_classic},
      {"MLP gradient check", mlp_gradient},
      {"external model protocol", external_protocol},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const bool known = known_failures.count(id) > 0;
    std::printf("criterion %2d %s: %s: %s\n", id, o.pass ? "PASS" : (known ? "FAIL (known)" : "FAIL"),
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
