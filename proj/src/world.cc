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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mccal/errors.h"

namespace mccal {

World::World(std::vector<double> masses, std::vector<ProbVector> conditionals)
    : masses_(std::move(masses)), conditionals_(std::move(conditionals)) {
  if (masses_.empty()) throw InvalidArgument("world has no features");
  if (masses_.size() != conditionals_.size()) {
    throw InvalidArgument("masses and conditionals differ in length");
  }
  k_ = conditionals_.front().size();
  double total = 0.0;
  for (size_t x = 0; x < masses_.size(); ++x) {
    if (!(masses_[x] >= 0.0) || !std::isfinite(masses_[x])) {
      throw InvalidArgument("negative or non-finite feature mass");
    }
    if (conditionals_[x].size() != k_) {
      throw InvalidArgument("conditional has the wrong class count");
    }
    total += masses_[x];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("feature masses do not sum to 1");
  }
}

Predictor::Predictor(std::vector<ProbVector> table) : table_(std::move(table)) {
  for (const auto& row : table_) {
    if (row.size() != table_.front().size()) {
      throw InvalidArgument("predictor rows differ in class count");
    }
  }
}

SampleCounts::SampleCounts(size_t n_features, size_t k)
    : n_features_(n_features), k_(k), counts_(n_features * k, 0) {}

SampleCounts SampleCounts::FromSamples(std::span<const Sample> samples,
                                       size_t n_features, size_t k) {
  SampleCounts out(n_features, k);
  for (const Sample& s : samples) {
    if (s.feature >= n_features || s.label >= k) {
      throw InvalidArgument("sample out of range");
    }
    out.Add(s.feature, s.label, 1);
  }
  return out;
}

int64_t SampleCounts::feature_count(size_t x) const {
  int64_t c = 0;
  for (size_t j = 0; j < k_; ++j) c += count(x, j);
  return c;
}

void SampleCounts::Add(size_t x, size_t label, int64_t c) {
  counts_[x * k_ + label] += c;
  total_ += c;
}

std::vector<Sample> Draw(const World& world, RngStream& rng, size_t n) {
  const size_t k = world.k();
  std::vector<double> cdf;
  cdf.reserve(world.n_features() * k);
  double acc = 0.0;
  for (size_t x = 0; x < world.n_features(); ++x) {
    for (size_t j = 0; j < k; ++j) {
      acc += world.mass(x) * world.conditional(x)[j];
      cdf.push_back(acc);
    }
  }
  std::vector<Sample> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const double u = rng.Uniform01() * acc;
    size_t cell = static_cast<size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    cell = std::min(cell, cdf.size() - 1);
    out.push_back({cell / k, cell % k});
  }
  return out;
}

SampleCounts DrawCounts(const World& world, RngStream& rng, int64_t n) {
  if (n < 0) throw InvalidArgument("negative sample count");
  const size_t k = world.k();
  SampleCounts out(world.n_features(), k);
  int64_t remaining = n;
  double remaining_mass = 1.0;
  const size_t cells = world.n_features() * k;
  for (size_t cell = 0; cell < cells && remaining > 0; ++cell) {
    const size_t x = cell / k;
    const size_t j = cell % k;
    const double p = world.mass(x) * world.conditional(x)[j];
    int64_t c;
    if (cell + 1 == cells) {
      c = remaining;
    } else if (remaining_mass <= 0.0) {
      c = 0;
    } else {
      c = rng.Binomial(remaining, std::min(1.0, p / remaining_mass));
    }
    out.Add(x, j, c);
    remaining -= c;
    remaining_mass -= p;
  }
  return out;
}

ScenarioKind ParseScenarioKind(std::string_view name) {
  if (name == "perfect") return ScenarioKind::kPerfect;
  if (name == "overconfident") return ScenarioKind::kOverconfident;
  if (name == "shifted") return ScenarioKind::kShifted;
  if (name == "random-miscalibrated") return ScenarioKind::kRandomMiscalibrated;
  throw InvalidArgument("unknown scenario: " + std::string(name));
}

std::string_view ScenarioName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kPerfect:
      return "perfect";
    case ScenarioKind::kOverconfident:
      return "overconfident";
    case ScenarioKind::kShifted:
      return "shifted";
    case ScenarioKind::kRandomMiscalibrated:
      return "random-miscalibrated";
  }
  return "unknown";
}

namespace {

std::vector<double> FlatDirichlet(RngStream& rng, size_t dim) {
  std::vector<double> w(dim);
  for (double& x : w) x = rng.Exponential();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

ProbVector RandomSimplexPoint(RngStream& rng, size_t k) {
  // Renormalized so the sum check never depends on summation order.
  return ProjectSimplex(FlatDirichlet(rng, k));
}

}  // namespace

ProbVector Overconfident(const ProbVector& q) {
  const auto& c = q.coords();
  const size_t top = static_cast<size_t>(
      std::max_element(c.begin(), c.end()) - c.begin());
  std::vector<double> out(c.size());
  for (size_t j = 0; j < c.size(); ++j) {
    out[j] = (1.0 - kOverconfidence) * c[j] + (j == top ? kOverconfidence : 0.0);
  }
  return ProjectSimplex(out);
}

ProbVector Shifted(const ProbVector& q) {
  const size_t k = q.size();
  std::vector<double> z = q.coords();
  if (k == 1) return q;
  z[0] += 0.25;
  for (size_t j = 1; j < k; ++j) z[j] -= 0.25 / static_cast<double>(k - 1);
  return ProjectSimplex(z);
}

Scenario MakeScenario(ScenarioKind kind, size_t k, size_t n_features,
                      uint64_t seed) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n_features < 1) throw InvalidArgument("n_features must be >= 1");
  RngStream rng(seed, "scenario");
  std::vector<double> masses = FlatDirichlet(rng, n_features);
  std::vector<ProbVector> conditionals;
  conditionals.reserve(n_features);
  for (size_t x = 0; x < n_features; ++x) {
    conditionals.push_back(RandomSimplexPoint(rng, k));
  }
  std::vector<ProbVector> f;
  f.reserve(n_features);
  for (size_t x = 0; x < n_features; ++x) {
    switch (kind) {
      case ScenarioKind::kPerfect:
        f.push_back(conditionals[x]);
        break;
      case ScenarioKind::kOverconfident:
        f.push_back(Overconfident(conditionals[x]));
        break;
      case ScenarioKind::kShifted:
        f.push_back(Shifted(conditionals[x]));
        break;
      case ScenarioKind::kRandomMiscalibrated:
        f.push_back(RandomSimplexPoint(rng, k));
        break;
    }
  }
  return {World(std::move(masses), std::move(conditionals)),
          Predictor(std::move(f))};
}

Scenario MakeScenario(std::string_view name, size_t k, size_t n_features,
                      uint64_t seed) {
  return MakeScenario(ParseScenarioKind(name), k, n_features, seed);
}

EventStats ExactEventStats(const World& world, const Predictor& f, int lambda,
                           const BinSet& bins) {
  if (bins.empty()) throw InvalidArgument("empty bin set");
  EventStats stats;
  stats.mean_label.assign(world.k(), 0.0);
  for (size_t x = 0; x < world.n_features(); ++x) {
    if (!bins.contains(RoundDown(f(x), lambda))) continue;
    stats.mass += world.mass(x);
    for (size_t j = 0; j < world.k(); ++j) {
      stats.mean_label[j] += world.mass(x) * world.conditional(x)[j];
    }
  }
  return stats;
}

}  // namespace mccal
