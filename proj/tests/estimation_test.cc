// Copyright 2026 The mccal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mccal/estimation.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mccal/calibrator.h"
#include "mccal/errors.h"
#include "mccal/rng.h"
#include "mccal/world.h"

namespace mccal {
namespace {

BinSet RangeOf(const Predictor& f, int lambda) {
  BinSet out;
  for (const ProbVector& row : f.table()) out.insert(RoundDown(row, lambda));
  return out;
}

TEST(EstimateBinMasses, OnePointWorld) {
  const Predictor f({ProbVector({0.9, 0.1})});
  const std::vector<Sample> samples(50, Sample{0, 1});
  const BinMassTable table = EstimateBinMasses(samples, f, 2);
  ASSERT_EQ(table.estimates().size(), 1u);
  EXPECT_DOUBLE_EQ(table.Get(LevelSet({1, 0}, 2)), 1.0);
  EXPECT_EQ(table.Get(LevelSet({0, 1}, 2)), 0.0);
  EXPECT_EQ(table.pool_size(), 50);
}

TEST(EstimateBinMasses, CountsAndSamplesAgree) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 20, 3);
  RngStream rng(1, "data/a1");
  const std::vector<Sample> samples = Draw(s.world, rng, 5000);
  const SampleCounts counts = SampleCounts::FromSamples(samples, 20, 3);
  const BinMassTable a = EstimateBinMasses(samples, s.predictor, 5);
  const BinMassTable b = EstimateBinMasses(counts, s.predictor, 5);
  EXPECT_EQ(a.estimates(), b.estimates());
  double total = 0.0;
  for (const auto& [v, mu] : a.estimates()) total += mu;
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(EstimateBinMasses, AccurateAtPrescribedSampleSize) {
  const double beta = 0.25;
  const double alpha = beta / 12;
  const double delta = 0.1 / 3;
  const int lambda = 4;
  const int64_t n = BinMassSampleSize(alpha, delta, CountLevels(lambda, 3));
  int failures = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = MakeScenario("random-miscalibrated", 3, 40, seed);
    RngStream rng(seed, "data/a1");
    const BinMassTable table =
        EstimateBinMasses(DrawCounts(s.world, rng, n), s.predictor, lambda);
    bool ok = true;
    for (const LevelSet& v : EnumerateLevels(lambda, 3)) {
      const double exact = ExactEventStats(s.world, s.predictor, lambda, {v}).mass;
      ok = ok && std::fabs(table.Get(v) - exact) <= alpha;
    }
    failures += ok ? 0 : 1;
  }
  EXPECT_LE(failures, 10);
}

TEST(SampleSizes, HeavyAndLightRegimes) {
  EXPECT_EQ(HeavyBinSampleSize(0.1, 0.1), 300);
  EXPECT_EQ(LightBinSampleSize(0.1, 0.1, 5), 62);
  EXPECT_EQ(BinMassSampleSize(0.1, 0.1, 5), 362);
  EXPECT_GT(BinMassSampleSize(0.05, 0.1, 5), BinMassSampleSize(0.1, 0.1, 5));
  EXPECT_GT(BinMassSampleSize(0.1, 0.1, 5), BinMassSampleSize(0.2, 0.1, 5));
  EXPECT_THROW(BinMassSampleSize(0.0, 0.1, 5), InvalidArgument);
  EXPECT_THROW(BinMassSampleSize(0.1, 1.0, 5), InvalidArgument);
}

TEST(SampleSizes, PoolFormula) {
  // 32 ln(1200) / 0.0025 = 90752.57...
  EXPECT_EQ(PoolSampleSize(10, 3, 0.05, 0.1), 90753);
  EXPECT_EQ(PoolSampleSize(1, 1, 0.5, 0.5), 267);
}

TEST(DisjointQueryPool, NoiseScaleAndPrivacy) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 10, 1);
  const DisjointQueryPool pool = DisjointQueryPool::Create(
      s.world, 1, "E/0", PoolKind::kLabel, 10, 0.05, 0.1);
  EXPECT_EQ(pool.m(), 90753);
  EXPECT_EQ(pool.value_dim(), 3u);
  EXPECT_DOUBLE_EQ(pool.noise_scale(), 8.0 / (90753 * 0.05));
  EXPECT_NEAR(pool.PrivacyEpsilon(), 0.05 / 4, 1e-15);
  EXPECT_EQ(pool.samples().total(), 90753);

  const DisjointQueryPool p = DisjointQueryPool::Create(
      s.world, 1, "P/0", PoolKind::kProbability, 10, 0.05, 0.1);
  EXPECT_EQ(p.value_dim(), 1u);
  EXPECT_EQ(p.m(), PoolSampleSize(10, 1, 0.05, 0.1));
}

TEST(DisjointQueryPool, DistinctNamesDrawDistinctSamples) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 10, 1);
  RngStream a(1, "data/P/0");
  RngStream b(1, "data/E/0");
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a() == b() ? 1 : 0;
  EXPECT_EQ(same, 0);
  const DisjointQueryPool pa = DisjointQueryPool::WithSampleSize(
      s.world, 1, "P/0", PoolKind::kProbability, 1, 0.1, 0.1, 1000);
  const DisjointQueryPool pb = DisjointQueryPool::WithSampleSize(
      s.world, 1, "E/0", PoolKind::kProbability, 1, 0.1, 0.1, 1000);
  bool differ = false;
  for (size_t x = 0; x < 10; ++x) {
    for (size_t y = 0; y < 3; ++y) {
      differ = differ || pa.samples().count(x, y) != pb.samples().count(x, y);
    }
  }
  EXPECT_TRUE(differ);
}

TEST(DisjointQueryPool, ZeroMassEventsGiveSmallAnswers) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 20, 2);
  const int lambda = 60;
  const BinSet hit = RangeOf(s.predictor, lambda);
  std::vector<LevelSet> empty;
  for (const LevelSet& v : EnumerateLevels(lambda, 3)) {
    if (!hit.contains(v)) empty.push_back(v);
    if (empty.size() == 1000) break;
  }
  ASSERT_EQ(empty.size(), 1000u);
  DisjointQueryPool pool = DisjointQueryPool::WithSampleSize(
      s.world, 2, "P/0", PoolKind::kProbability, 1000, 0.1, 0.1, 1000);
  double total = 0.0;
  for (const LevelSet& v : empty) {
    const double a = pool.Query({v}, s.predictor, lambda)[0];
    ASSERT_GE(a, 0.0);
    ASSERT_LE(a, 1.0);
    total += std::fabs(a);
  }
  EXPECT_LE(total / 1000, 3 * pool.noise_scale());
  EXPECT_EQ(pool.queries_issued(), 1000u);
}

TEST(DisjointQueryPool, FullSupportEventNearOne) {
  const double alpha = 0.05;
  const double delta = 0.1;
  int failures = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = MakeScenario("random-miscalibrated", 3, 20, seed);
    DisjointQueryPool pool = DisjointQueryPool::Create(
        s.world, seed, "P/0", PoolKind::kProbability, 1, alpha, delta);
    const double a = pool.Query(RangeOf(s.predictor, 5), s.predictor, 5)[0];
    failures += std::fabs(a - 1.0) <= alpha ? 0 : 1;
  }
  EXPECT_LE(failures, 15);
}

TEST(DisjointQueryPool, LabelAnswersTrackExactStats) {
  const double alpha = 0.05;
  const double delta = 0.1;
  const int lambda = 4;
  int failures = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = MakeScenario("random-miscalibrated", 3, 20, seed);
    const BinSet range = RangeOf(s.predictor, lambda);
    const LevelSet v = *range.begin();
    DisjointQueryPool pool = DisjointQueryPool::Create(
        s.world, seed, "E/0", PoolKind::kLabel, 1, alpha, delta);
    const std::vector<double> a = pool.Query({v}, s.predictor, lambda);
    const EventStats exact = ExactEventStats(s.world, s.predictor, lambda, {v});
    bool ok = true;
    for (size_t j = 0; j < 3; ++j) ok = ok && std::fabs(a[j] - exact.mean_label[j]) <= alpha;
    failures += ok ? 0 : 1;
  }
  EXPECT_LE(failures, 15);
}

TEST(DisjointQueryPool, RejectsOverlapAndOverBudget) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 10, 1);
  DisjointQueryPool pool = DisjointQueryPool::WithSampleSize(
      s.world, 1, "P/0", PoolKind::kProbability, 2, 0.1, 0.1, 100);
  const LevelSet a({1, 1, 1}, 4);
  const LevelSet b({2, 1, 0}, 4);
  const LevelSet c({0, 0, 3}, 4);
  pool.Query({a}, s.predictor, 4);
  EXPECT_THROW(pool.Query({a, b}, s.predictor, 4), DisjointnessViolation);
  pool.Query({b}, s.predictor, 4);
  EXPECT_THROW(pool.Query({c}, s.predictor, 4), QueryBudgetExceeded);
  EXPECT_EQ(pool.queries_issued(), 2u);
}

TEST(DisjointQueryPool, AnswersAlwaysInUnitInterval) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 20, 8);
  const int lambda = 6;
  const std::vector<LevelSet> levels = EnumerateLevels(lambda, 3);
  DisjointQueryPool pool = DisjointQueryPool::WithSampleSize(
      s.world, 8, "E/0", PoolKind::kLabel, levels.size(), 0.01, 0.1, 5);
  for (const LevelSet& v : levels) {
    for (double a : pool.Query({v}, s.predictor, lambda)) {
      ASSERT_GE(a, 0.0);
      ASSERT_LE(a, 1.0);
    }
  }
}

}  // namespace
}  // namespace mccal
