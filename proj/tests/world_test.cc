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


#include "mccal/world.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "mccal/errors.h"
#include "mccal/evaluator.h"
#include "mccal/rng.h"

namespace mccal {
namespace {

World OnePoint() { return World({1.0}, {ProbVector({0.6, 0.4})}); }

TEST(Draw, DegenerateWorldAlwaysGivesLabelZero) {
  const World world({1.0}, {ProbVector({1.0, 0.0})});
  RngStream rng(3, "data/test");
  for (const Sample& s : Draw(world, rng, 1000)) {
    EXPECT_EQ(s.feature, 0u);
    EXPECT_EQ(s.label, 0u);
  }
}

TEST(Draw, FeatureFrequencyConverges) {
  const World world({0.5, 0.5}, {ProbVector({1, 0}), ProbVector({0, 1})});
  RngStream rng(5, "data/test");
  const std::vector<Sample> samples = Draw(world, rng, 100000);
  double ones = 0;
  for (const Sample& s : samples) ones += s.feature == 1 ? 1 : 0;
  EXPECT_NEAR(ones / samples.size(), 0.5, 0.01);
}

TEST(Draw, DeterministicPerStream) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 10, 1);
  RngStream a(9, "data/x");
  RngStream b(9, "data/x");
  RngStream c(9, "data/y");
  const std::vector<Sample> da = Draw(s.world, a, 500);
  EXPECT_EQ(da, Draw(s.world, b, 500));
  EXPECT_NE(da, Draw(s.world, c, 500));
}

TEST(DrawCounts, TotalsAndFrequencies) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 8, 2);
  RngStream rng(4, "data/counts");
  const int64_t n = 2000000;
  const SampleCounts counts = DrawCounts(s.world, rng, n);
  EXPECT_EQ(counts.total(), n);
  int64_t sum = 0;
  for (size_t x = 0; x < 8; ++x) {
    sum += counts.feature_count(x);
    for (size_t y = 0; y < 3; ++y) {
      const double expected = s.world.mass(x) * s.world.conditional(x)[y];
      EXPECT_NEAR(static_cast<double>(counts.count(x, y)) / n, expected, 0.003);
    }
  }
  EXPECT_EQ(sum, n);

  RngStream again(4, "data/counts");
  const SampleCounts repeat = DrawCounts(s.world, again, n);
  for (size_t x = 0; x < 8; ++x) {
    for (size_t y = 0; y < 3; ++y) EXPECT_EQ(repeat.count(x, y), counts.count(x, y));
  }
}

TEST(DrawCounts, HugeSampleSizes) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 40, 6);
  RngStream rng(1, "data/huge");
  const SampleCounts counts = DrawCounts(s.world, rng, 8'000'000'000LL);
  EXPECT_EQ(counts.total(), 8'000'000'000LL);
  for (size_t x = 0; x < 40; ++x) {
    EXPECT_NEAR(static_cast<double>(counts.feature_count(x)) / 8e9,
                s.world.mass(x), 1e-4);
  }
}

TEST(World, RejectsBadMasses) {
  EXPECT_THROW(World({0.5, 0.6}, {ProbVector({1, 0}), ProbVector({1, 0})}),
               InvalidArgument);
  EXPECT_THROW(World({-0.5, 1.5}, {ProbVector({1, 0}), ProbVector({1, 0})}),
               InvalidArgument);
}

TEST(MakeScenario, PerfectHasZeroError) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = MakeScenario("perfect", 3, 20, seed);
    for (const NormExponent& p : {NormExponent::Infinity(), NormExponent::Rational(2),
                                  NormExponent::Rational(1)}) {
      EXPECT_NEAR(ExactLpError(s.world, s.predictor, 5, p), 0.0, 1e-12);
    }
  }
}

TEST(MakeScenario, OverconfidentOnePoint) {
  const World world = OnePoint();
  const Predictor f({ProbVector({0.9, 0.1})});
  const LevelSet v = RoundDown(f(0), 2);
  EXPECT_NEAR(ExactBinClassError(world, f, 2, v, 0), 0.3, 1e-12);
  const ProbVector pushed = Overconfident(ProbVector({0.6, 0.4}));
  EXPECT_NEAR(pushed[0], 0.9, 1e-12);
  EXPECT_NEAR(pushed[1], 0.1, 1e-12);
}

TEST(MakeScenario, AllRowsValid) {
  for (const char* name : {"perfect", "overconfident", "shifted", "random-miscalibrated"}) {
    for (size_t k : {2u, 3u, 5u}) {
      const Scenario s = MakeScenario(name, k, 30, 17);
      ASSERT_EQ(s.predictor.size(), 30u);
      for (const ProbVector& row : s.predictor.table()) {
        ASSERT_TRUE(IsProbVector(row.coords()));
        ASSERT_EQ(row.size(), k);
      }
      double total = 0.0;
      for (double m : s.world.masses()) total += m;
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(MakeScenario, ReproducibleAndNamed) {
  const Scenario a = MakeScenario("shifted", 3, 12, 99);
  const Scenario b = MakeScenario(ScenarioKind::kShifted, 3, 12, 99);
  EXPECT_EQ(a.world.masses(), b.world.masses());
  EXPECT_EQ(a.predictor.table(), b.predictor.table());
  EXPECT_EQ(ScenarioName(ParseScenarioKind("shifted")), "shifted");
  EXPECT_THROW(MakeScenario("bogus", 3, 12, 1), InvalidArgument);
}

TEST(ExactEventStats, TotalProbability) {
  const Scenario s = MakeScenario("random-miscalibrated", 3, 25, 4);
  BinSet all;
  for (const LevelSet& v : EnumerateLevels(4, 3)) all.insert(v);
  const EventStats stats = ExactEventStats(s.world, s.predictor, 4, all);
  EXPECT_NEAR(stats.mass, 1.0, 1e-12);
  double total = 0.0;
  for (double e : stats.mean_label) total += e;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ExactEventStats, EmptyEventAndOnePoint) {
  const World world = OnePoint();
  const Predictor f({ProbVector({0.9, 0.1})});
  const EventStats none = ExactEventStats(world, f, 2, {LevelSet({0, 1}, 2)});
  EXPECT_EQ(none.mass, 0.0);
  EXPECT_EQ(none.mean_label, std::vector<double>({0.0, 0.0}));

  const EventStats hit = ExactEventStats(world, f, 2, {LevelSet({1, 0}, 2)});
  EXPECT_DOUBLE_EQ(hit.mass, 1.0);
  EXPECT_DOUBLE_EQ(hit.mean_label[0], 0.6);
  EXPECT_DOUBLE_EQ(hit.mean_label[1], 0.4);
}

TEST(ExactEventStats, EmpiricalFrequenciesConverge) {
  for (uint64_t seed : {1u, 2u, 3u}) {
    const Scenario s = MakeScenario("random-miscalibrated", 3, 15, seed);
    const int lambda = 4;
    RngStream rng(seed, "data/converge");
    const std::vector<Sample> samples = Draw(s.world, rng, 100000);
    std::map<LevelSet, std::vector<double>> freq;
    for (const Sample& x : samples) {
      std::vector<double>& row = freq[RoundDown(s.predictor(x.feature), lambda)];
      row.resize(4, 0.0);
      row[0] += 1.0 / samples.size();
      row[1 + x.label] += 1.0 / samples.size();
    }
    for (const LevelSet& v : EnumerateLevels(lambda, 3)) {
      const EventStats exact = ExactEventStats(s.world, s.predictor, lambda, {v});
      const std::vector<double> row =
          freq.count(v) ? freq[v] : std::vector<double>(4, 0.0);
      EXPECT_NEAR(row[0], exact.mass, 0.01);
      for (size_t j = 0; j < 3; ++j) EXPECT_NEAR(row[1 + j], exact.mean_label[j], 0.01);
    }
  }
}

}  // namespace
}  // namespace mccal
