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

#include <algorithm>
#include <cmath>
#include <utility>

#include "mccal/errors.h"

namespace mccal {
namespace {

void CheckUnitOpen(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in (0, 1)");
  }
}

int64_t CeilToCount(double v) {
  if (!std::isfinite(v) || v > 9.0e18) {
    throw InvalidArgument("sample size overflows");
  }
  return static_cast<int64_t>(std::ceil(v));
}

}  // namespace

double BinMassTable::Get(const LevelSet& v) const {
  auto it = estimates_.find(v);
  return it == estimates_.end() ? 0.0 : it->second;
}

BinMassTable EstimateBinMasses(const SampleCounts& samples, const Predictor& f,
                               int lambda) {
  if (samples.total() <= 0) throw InvalidArgument("no samples");
  std::map<LevelSet, int64_t> counts;
  for (size_t x = 0; x < samples.n_features(); ++x) {
    const int64_t c = samples.feature_count(x);
    if (c > 0) counts[RoundDown(f(x), lambda)] += c;
  }
  std::map<LevelSet, double> estimates;
  const double n = static_cast<double>(samples.total());
  for (const auto& [v, c] : counts) estimates.emplace(v, c / n);
  return BinMassTable(std::move(estimates), samples.total());
}

BinMassTable EstimateBinMasses(std::span<const Sample> samples,
                               const Predictor& f, int lambda) {
  if (samples.empty()) throw InvalidArgument("no samples");
  size_t n_features = f.size();
  return EstimateBinMasses(SampleCounts::FromSamples(samples, n_features, f.k()),
                           f, lambda);
}

int64_t HeavyBinSampleSize(double alpha, double delta) {
  CheckUnitOpen(alpha, "alpha");
  CheckUnitOpen(delta, "delta");
  return CeilToCount(std::log(4.0 / (alpha * delta)) / (2.0 * alpha * alpha));
}

int64_t LightBinSampleSize(double alpha, double delta, uint64_t num_levels) {
  CheckUnitOpen(alpha, "alpha");
  CheckUnitOpen(delta, "delta");
  if (num_levels == 0) throw InvalidArgument("empty level family");
  return CeilToCount(4.0 / (3.0 * alpha) *
                     std::log(2.0 * static_cast<double>(num_levels) / delta));
}

int64_t BinMassSampleSize(double alpha, double delta, uint64_t num_levels) {
  return HeavyBinSampleSize(alpha, delta) +
         LightBinSampleSize(alpha, delta, num_levels);
}

int64_t PoolSampleSize(size_t max_events, size_t value_dim, double alpha,
                       double delta) {
  CheckUnitOpen(alpha, "alpha");
  CheckUnitOpen(delta, "delta");
  if (max_events == 0 || value_dim == 0) {
    throw InvalidArgument("pool needs at least one event and dimension");
  }
  const double nk = static_cast<double>(max_events) *
                    static_cast<double>(value_dim);
  return CeilToCount(32.0 * std::log(4.0 * nk / delta) / (alpha * alpha));
}

DisjointQueryPool::DisjointQueryPool(std::string name, PoolKind kind,
                                     size_t value_dim, size_t max_events,
                                     double alpha, double delta, int64_t m,
                                     SampleCounts samples, RngStream laplace)
    : name_(std::move(name)),
      kind_(kind),
      value_dim_(value_dim),
      max_events_(max_events),
      alpha_(alpha),
      delta_(delta),
      m_(m),
      noise_scale_(8.0 / (static_cast<double>(m) * alpha)),
      samples_(std::move(samples)),
      laplace_(std::move(laplace)) {}

DisjointQueryPool DisjointQueryPool::Create(const World& world, uint64_t seed,
                                            std::string name, PoolKind kind,
                                            size_t max_events, double alpha,
                                            double delta) {
  const size_t dim = kind == PoolKind::kLabel ? world.k() : 1;
  const int64_t m = PoolSampleSize(max_events, dim, alpha, delta);
  return WithSampleSize(world, seed, std::move(name), kind, max_events, alpha,
                        delta, m);
}

DisjointQueryPool DisjointQueryPool::WithSampleSize(
    const World& world, uint64_t seed, std::string name, PoolKind kind,
    size_t max_events, double alpha, double delta, int64_t m) {
  CheckUnitOpen(alpha, "alpha");
  CheckUnitOpen(delta, "delta");
  if (m < 1) throw InvalidArgument("pool size must be positive");
  if (max_events == 0) throw InvalidArgument("pool needs at least one event");
  const size_t dim = kind == PoolKind::kLabel ? world.k() : 1;
  RngStream data(seed, "data/" + name);
  SampleCounts samples = DrawCounts(world, data, m);
  RngStream laplace(seed, "laplace/" + name);
  return DisjointQueryPool(std::move(name), kind, dim, max_events, alpha, delta,
                           m, std::move(samples), std::move(laplace));
}

std::vector<double> DisjointQueryPool::Query(const BinSet& event,
                                             const Predictor& f, int lambda) {
  if (queries_issued_ >= max_events_) {
    throw QueryBudgetExceeded("pool " + name_ + " answered all " +
                              std::to_string(max_events_) + " queries");
  }
  for (const LevelSet& v : event) {
    if (queried_.contains(v)) {
      throw DisjointnessViolation("pool " + name_ + ": bin (" + v.ToString() +
                                  ") was already queried");
    }
  }
  std::vector<int64_t> sums(value_dim_, 0);
  for (size_t x = 0; x < samples_.n_features(); ++x) {
    if (samples_.feature_count(x) == 0) continue;
    if (!event.contains(RoundDown(f(x), lambda))) continue;
    if (kind_ == PoolKind::kProbability) {
      sums[0] += samples_.feature_count(x);
    } else {
      for (size_t j = 0; j < value_dim_; ++j) sums[j] += samples_.count(x, j);
    }
  }
  std::vector<double> answers(value_dim_);
  const double m = static_cast<double>(m_);
  for (size_t j = 0; j < value_dim_; ++j) {
    const double noisy = sums[j] / m + laplace_.Laplace(noise_scale_);
    answers[j] = std::clamp(noisy, 0.0, 1.0);
  }
  queried_.insert(event.begin(), event.end());
  ++queries_issued_;
  return answers;
}

}  // namespace mccal
