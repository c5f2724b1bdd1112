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
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vacaug/augmentation.hpp"
#include "vacaug/errors.hpp"

namespace vacaug {
namespace {

using testing::TempDir;

TEST(SparseWeights, SingleAtom) {
  Rng rng = make_stream(1, 0);
  const auto w = sample_sparse_weights(1, rng);
  ASSERT_EQ(w.weights.size(), 1u);
  EXPECT_EQ(w.weights[0], 1.0);
  EXPECT_EQ(w.nnz, 1u);
}

TEST(SparseWeights, OnSimplexAndSparse) {
  Rng rng = make_stream(2, 0);
  std::vector<std::size_t> nnz_seen(4, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto w = sample_sparse_weights(7, rng);
    ASSERT_EQ(w.weights.size(), 7u);
    const double sum = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
    ASSERT_NEAR(sum, 1.0, 1e-12);
    const auto nonzero = static_cast<std::size_t>(
        std::count_if(w.weights.begin(), w.weights.end(), [](double v) { return v != 0.0; }));
    ASSERT_EQ(nonzero, w.nnz);
    ASSERT_GE(w.nnz, 1u);
    ASSERT_LE(w.nnz, 3u);
    for (double v : w.weights) ASSERT_GE(v, 0.0);
    ++nnz_seen[w.nnz];
  }
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_NEAR(nnz_seen[k] / 20000.0, 1.0 / 3.0, 0.02);
}

TEST(SparseWeights, NnzCappedByAtomCountAndOption) {
  Rng rng = make_stream(3, 0);
  for (int i = 0; i < 200; ++i) {
    EXPECT_LE(sample_sparse_weights(2, rng).nnz, 2u);
    EXPECT_EQ(sample_sparse_weights(10, rng, 1).nnz, 1u);
  }
  EXPECT_THROW(sample_sparse_weights(0, rng), std::invalid_argument);
}

TEST(SparseWeights, EveryAtomEventuallyPicked) {
  Rng rng = make_stream(4, 0);
  std::vector<bool> hit(40, false);
  for (int i = 0; i < 100000; ++i) {
    const auto w = sample_sparse_weights(40, rng);
    for (std::size_t a = 0; a < 40; ++a) {
      if (w.weights[a] > 0.0) hit[a] = true;
    }
  }
  EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
}

TEST(BoundedScalar, DegenerateReturnsMean) {
  Rng rng = make_stream(5, 0);
  const ScalarDistribution d{5.0, 0.0, 4.0, 6.0};
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_bounded_scalar(d, rng), 5.0);
  const ScalarDistribution pinned{5.0, 2.0, 5.0, 5.0};
  EXPECT_EQ(sample_bounded_scalar(pinned, rng), 5.0);
}

TEST(BoundedScalar, StaysInBoundsWithUnbiasedMean) {
  Rng rng = make_stream(6, 0);
  const ScalarDistribution d{1000.0, 16.84, 950.0, 1050.0};
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = sample_bounded_scalar(d, rng);
    ASSERT_GE(v, 950.0);
    ASSERT_LE(v, 1050.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 100000.0, 1000.0, 0.5);
}

TEST(BoundedScalar, RefusesUnreachableBounds) {
  Rng rng = make_stream(7, 0);
  EXPECT_THROW(sample_bounded_scalar(ScalarDistribution{0.0, 1.0, 10.0, 11.0}, rng), ValidationError);
  EXPECT_THROW(sample_bounded_scalar(ScalarDistribution{0.0, 1.0, 2.0, 1.0}, rng), ValidationError);
  EXPECT_THROW(sample_bounded_scalar(ScalarDistribution{0.0, 0.0, 2.0, 3.0}, rng), ValidationError);
}

Decomposition small_decomposition(std::size_t resolution = 500) {
  SyntheticCorpusSpec spec;
  spec.n_events = 60;
  spec.noise_rel = 0.002;
  spec.seed = 21;
  return decompose(generate_synthetic(spec), resolution);
}

TEST(GenerateAugmented, SingleAtomZeroVarianceGivesIdenticalSamples) {
  SpeedDictionary dict;
  dict.resolution = 100;
  dict.atoms = {SpeedVector{std::vector<double>(100, 0.01)}};
  const ScalarDistribution p0{1000.0, 0.0, 1000.0, 1000.0};
  const ScalarDistribution t{300.0, 0.0, 300.0, 300.0};
  AugmentOptions opt;
  opt.m = 3;
  const auto set = generate_augmented(dict, p0, t, ChamberSpec{}, opt);
  ASSERT_EQ(set.samples.size(), 3u);
  for (const auto& s : set.samples) {
    EXPECT_EQ(s.curve.pressures_mbar, set.samples[0].curve.pressures_mbar);
    EXPECT_EQ(s.weights.weights, std::vector<double>{1.0});
    EXPECT_NEAR(s.min_pressure, 1000.0 * std::exp(-0.01 * 300.0), 1e-9);
    EXPECT_NEAR(s.first_minute[59], 1000.0 * std::exp(-0.01 * 60.0), 1e-9);
  }
}

TEST(GenerateAugmented, InvariantsHold) {
  const auto d = small_decomposition();
  AugmentOptions opt;
  opt.m = 2000;
  opt.seed = 5;
  opt.workers = 4;
  const auto set = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  ASSERT_EQ(set.samples.size(), 2000u);
  double atom_max = 0.0;
  for (const auto& a : d.dictionary.atoms) atom_max = std::max(atom_max, *std::max_element(a.values.begin(), a.values.end()));
  for (const auto& s : set.samples) {
    ASSERT_GE(s.p0, d.p0.observed_min);
    ASSERT_LE(s.p0, d.p0.observed_max);
    ASSERT_GE(s.pump_down_time, std::max(60.0, d.pump_down_time.observed_min));
    ASSERT_LE(s.pump_down_time, d.pump_down_time.observed_max);
    ASSERT_NEAR(std::accumulate(s.weights.weights.begin(), s.weights.weights.end(), 0.0), 1.0, 1e-12);
    ASSERT_EQ(s.curve.size(), d.dictionary.resolution + 1);
    ASSERT_NEAR(s.curve.pump_down_time(), s.pump_down_time, 1e-9 * s.pump_down_time);
    for (std::size_t k = 0; k < s.curve.size(); ++k) {
      ASSERT_GT(s.curve.pressures_mbar[k], 0.0);
      if (k > 0) {
        ASSERT_LE(s.curve.pressures_mbar[k], s.curve.pressures_mbar[k - 1]);
      }
    }
    ASSERT_EQ(s.min_pressure, s.curve.min_pressure());
    ASSERT_EQ(s.first_minute[0], s.curve.pressure_at_time(1.0));
    ASSERT_EQ(s.first_minute[59], s.curve.pressure_at_time(60.0));
    // Mixed speeds between consecutive samples stay within the convex bound.
    const double dt = s.pump_down_time / static_cast<double>(d.dictionary.resolution);
    for (std::size_t k = 0; k + 1 < s.curve.size(); k += 97) {
      const double speed = std::log(s.curve.pressures_mbar[k] / s.curve.pressures_mbar[k + 1]) / dt;
      ASSERT_LE(speed, atom_max * (1.0 + 1e-9));
    }
  }
}

TEST(GenerateAugmented, IndependentOfWorkerCount) {
  const auto d = small_decomposition();
  AugmentOptions opt;
  opt.m = 500;
  opt.seed = 42;
  opt.workers = 1;
  const auto serial = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  opt.workers = 8;
  const auto parallel = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  for (std::size_t i = 0; i < serial.samples.size(); ++i) {
    ASSERT_EQ(serial.samples[i].curve.pressures_mbar, parallel.samples[i].curve.pressures_mbar);
    ASSERT_EQ(serial.samples[i].weights.weights, parallel.samples[i].weights.weights);
    ASSERT_EQ(serial.samples[i].p0, parallel.samples[i].p0);
  }
  opt.seed = 43;
  const auto other = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  EXPECT_NE(other.samples[0].curve.pressures_mbar, serial.samples[0].curve.pressures_mbar);
}

TEST(GenerateAugmented, RejectsShortOnlyTimes) {
  SpeedDictionary dict;
  dict.resolution = 10;
  dict.atoms = {SpeedVector{std::vector<double>(10, 0.01)}};
  const ScalarDistribution p0{1000.0, 0.0, 1000.0, 1000.0};
  AugmentOptions opt;
  opt.m = 2;
  EXPECT_THROW(generate_augmented(dict, p0, ScalarDistribution{40.0, 5.0, 30.0, 50.0}, ChamberSpec{}, opt),
               ValidationError);
  // Reachable but rare: 60 s sits far in the tail.
  EXPECT_THROW(generate_augmented(dict, p0, ScalarDistribution{40.0, 2.0, 30.0, 60.5}, ChamberSpec{}, opt),
               ValidationError);
  EXPECT_THROW(generate_augmented(SpeedDictionary{}, p0, ScalarDistribution{100.0, 0.0, 100.0, 100.0},
                                  ChamberSpec{}, opt),
               ValidationError);
}

TEST(GenerateAugmented, PaperScaleCount) {
  const auto d = small_decomposition(40);
  AugmentOptions opt;
  opt.m = 100000;
  opt.seed = 9;
  opt.workers = 0;
  const auto set = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  ASSERT_EQ(set.samples.size(), 100000u);
  std::size_t bad = 0;
  for (const auto& s : set.samples) {
    bad += !(s.min_pressure > 0.0) || s.p0 < d.p0.observed_min || s.p0 > d.p0.observed_max ||
           s.pump_down_time > d.pump_down_time.observed_max || s.pump_down_time < 60.0;
  }
  EXPECT_EQ(bad, 0u);
}

TEST(FirstMinute, HoldsLastValueOnShortCurves) {
  PumpDownCurve c;
  c.times_s = {0.0, 30.0};
  c.pressures_mbar = {1000.0, 10.0};
  const auto fm = first_minute(c);
  EXPECT_NEAR(fm[0], 1000.0 * std::pow(0.01, 1.0 / 30.0), 1e-9);
  EXPECT_EQ(fm[29], 10.0);
  EXPECT_EQ(fm[59], 10.0);
  EXPECT_FALSE(has_first_minute(c));
}

TEST(AugmentedIo, WriteLoadRoundTripAndStableBytes) {
  const auto d = small_decomposition(100);
  AugmentOptions opt;
  opt.m = 50;
  opt.seed = 3;
  const auto set = generate_augmented(d.dictionary, d.p0, d.pump_down_time, ChamberSpec{}, opt);
  TempDir a, b;
  write_augmented(a.path(), set, d);
  write_augmented(b.path(), set, d);
  const auto back = load_augmented(a.path(), ChamberSpec{});
  ASSERT_EQ(back.samples.size(), 50u);
  EXPECT_EQ(back.seed, 3u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(back.samples[i].p0, set.samples[i].p0);
    EXPECT_EQ(back.samples[i].weights.weights, set.samples[i].weights.weights);
    EXPECT_NEAR(back.samples[i].min_pressure / set.samples[i].min_pressure, 1.0, 1e-8);
  }
  EXPECT_EQ(testing::read_text(a / "aug_000017.csv"), testing::read_text(b / "aug_000017.csv"));
  auto ma = read_json(a / "augmented_manifest.json");
  auto mb = read_json(b / "augmented_manifest.json");
  EXPECT_EQ(ma.at("dictionary_hash"), dictionary_hash(d.dictionary));
  ma.erase("created_at");
  mb.erase("created_at");
  EXPECT_EQ(ma.dump(), mb.dump());
}

}  // namespace
}  // namespace vacaug
