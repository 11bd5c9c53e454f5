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

#ifndef MCCAL_WORLD_H_
#define MCCAL_WORLD_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mccal/rng.h"
#include "mccal/simplex.h"

namespace mccal {

// A finite data distribution. Features are abstract indices; only their
// probability mass and conditional label law matter.
class World {
 public:
  World() = default;
  World(std::vector<double> masses, std::vector<ProbVector> conditionals);

  size_t k() const { return k_; }
  size_t n_features() const { return masses_.size(); }
  double mass(size_t x) const { return masses_[x]; }
  const ProbVector& conditional(size_t x) const { return conditionals_[x]; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<ProbVector>& conditionals() const { return conditionals_; }

 private:
  size_t k_ = 0;
  std::vector<double> masses_;
  std::vector<ProbVector> conditionals_;
};

// A k-class predictor over a world's features, as a lookup table.
class Predictor {
 public:
  Predictor() = default;
  explicit Predictor(std::vector<ProbVector> table);

  size_t size() const { return table_.size(); }
  size_t k() const { return table_.empty() ? 0 : table_.front().size(); }
  const ProbVector& operator()(size_t x) const { return table_[x]; }
  const std::vector<ProbVector>& table() const { return table_; }

 private:
  std::vector<ProbVector> table_;
};

struct Sample {
  size_t feature = 0;
  size_t label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// A multiset of samples as (feature, label) counts. Sufficient statistic for
// every indicator query the algorithm issues.
class SampleCounts {
 public:
  SampleCounts() = default;
  SampleCounts(size_t n_features, size_t k);

  static SampleCounts FromSamples(std::span<const Sample> samples,
                                  size_t n_features, size_t k);

  size_t n_features() const { return n_features_; }
  size_t k() const { return k_; }
  int64_t total() const { return total_; }
  int64_t count(size_t x, size_t label) const { return counts_[x * k_ + label]; }
  int64_t feature_count(size_t x) const;
  void Add(size_t x, size_t label, int64_t c);

 private:
  size_t n_features_ = 0;
  size_t k_ = 0;
  int64_t total_ = 0;
  std::vector<int64_t> counts_;
};

// n i.i.d. samples by inverse CDF over the joint (feature, label) law.
std::vector<Sample> Draw(const World& world, RngStream& rng, size_t n);

// n i.i.d. samples drawn directly as counts: one multinomial over the
// (feature, label) cells, realized as sequential conditional binomials in
// feature-major order.
SampleCounts DrawCounts(const World& world, RngStream& rng, int64_t n);

enum class ScenarioKind { kPerfect, kOverconfident, kShifted, kRandomMiscalibrated };

ScenarioKind ParseScenarioKind(std::string_view name);
std::string_view ScenarioName(ScenarioKind kind);

struct Scenario {
  World world;
  Predictor predictor;
};

// Reproducible world + initial predictor. Masses and conditionals are drawn
// from the flat Dirichlet on the "scenario" stream of `seed`.
Scenario MakeScenario(ScenarioKind kind, size_t k, size_t n_features,
                      uint64_t seed);
Scenario MakeScenario(std::string_view name, size_t k, size_t n_features,
                      uint64_t seed);

// Weight given to the argmax vertex by the overconfident scenario.
inline constexpr double kOverconfidence = 0.75;

// (1 - kOverconfidence) * q + kOverconfidence * e_argmax(q); ties go to the
// smaller class.
ProbVector Overconfident(const ProbVector& q);

// pi(q + b) with b = +0.25 on class 0 and -0.25/(k-1) on the others.
ProbVector Shifted(const ProbVector& q);

struct EventStats {
  double mass = 0.0;
  std::vector<double> mean_label;  // E[y_j * 1[R(f(x)) in bins]]
};

// Exact P[R(f(x)) in bins] and E[y_j 1[R(f(x)) in bins]] by enumeration.
EventStats ExactEventStats(const World& world, const Predictor& f, int lambda,
                           const BinSet& bins);

}  // namespace mccal

#endif  // MCCAL_WORLD_H_
