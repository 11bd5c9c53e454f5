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

#ifndef MCCAL_ESTIMATION_H_
#define MCCAL_ESTIMATION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mccal/rng.h"
#include "mccal/simplex.h"
#include "mccal/world.h"

namespace mccal {

// Empirical frequencies of the events R(f(x)) = v. Bins never observed are
// implicitly 0.
class BinMassTable {
 public:
  BinMassTable() = default;
  BinMassTable(std::map<LevelSet, double> estimates, int64_t pool_size)
      : estimates_(std::move(estimates)), pool_size_(pool_size) {}

  double Get(const LevelSet& v) const;
  const std::map<LevelSet, double>& estimates() const { return estimates_; }
  int64_t pool_size() const { return pool_size_; }

 private:
  std::map<LevelSet, double> estimates_;
  int64_t pool_size_ = 0;
};

BinMassTable EstimateBinMasses(const SampleCounts& samples, const Predictor& f,
                               int lambda);
BinMassTable EstimateBinMasses(std::span<const Sample> samples,
                               const Predictor& f, int lambda);

// Heavy-bin regime: ceil(ln(4 / (alpha delta)) / (2 alpha^2)).
int64_t HeavyBinSampleSize(double alpha, double delta);
// Light-bin regime: ceil(4 / (3 alpha) * ln(2 |V| / delta)).
int64_t LightBinSampleSize(double alpha, double delta, uint64_t num_levels);
// Sum of the two regimes; one pool of this size serves every bin.
int64_t BinMassSampleSize(double alpha, double delta, uint64_t num_levels);

// ceil(32 ln(4 n d / delta) / alpha^2) for n disjoint events of dimension d.
int64_t PoolSampleSize(size_t max_events, size_t value_dim, double alpha,
                       double delta);

enum class PoolKind {
  kProbability,  // phi = 1, answers P[R(f(x)) in S]
  kLabel,        // phi = one-hot label, answers E[y_j 1[R(f(x)) in S]]
};

// A fixed sample answering a sequence of adaptively chosen, pairwise
// disjoint bin events with Laplace noise of scale 8 / (m alpha). The pool
// rejects any event that overlaps an earlier one.
//
// Samples come from stream "data/<name>" and noise from "laplace/<name>" of
// the master seed, so distinct pool names never share draws.
class DisjointQueryPool {
 public:
  // m = PoolSampleSize(max_events, value_dim, alpha, delta).
  static DisjointQueryPool Create(const World& world, uint64_t seed,
                                  std::string name, PoolKind kind,
                                  size_t max_events, double alpha,
                                  double delta);
  // Caller-chosen m; the noise scale still uses alpha.
  static DisjointQueryPool WithSampleSize(const World& world, uint64_t seed,
                                          std::string name, PoolKind kind,
                                          size_t max_events, double alpha,
                                          double delta, int64_t m);

  // One answer per value dimension, each clamped to [0, 1].
  std::vector<double> Query(const BinSet& event, const Predictor& f,
                            int lambda);

  const std::string& name() const { return name_; }
  PoolKind kind() const { return kind_; }
  size_t value_dim() const { return value_dim_; }
  int64_t m() const { return m_; }
  double alpha() const { return alpha_; }
  double delta() const { return delta_; }
  double noise_scale() const { return noise_scale_; }
  size_t max_events() const { return max_events_; }
  size_t queries_issued() const { return queries_issued_; }
  const BinSet& queried_bins() const { return queried_; }
  const SampleCounts& samples() const { return samples_; }
  // l1 sensitivity (2/m) over noise scale; the mechanism is
  // (PrivacyEpsilon(), 0)-differentially private.
  double PrivacyEpsilon() const {
    return (2.0 / static_cast<double>(m_)) / noise_scale_;
  }

 private:
  DisjointQueryPool(std::string name, PoolKind kind, size_t value_dim,
                    size_t max_events, double alpha, double delta, int64_t m,
                    SampleCounts samples, RngStream laplace);

  std::string name_;
  PoolKind kind_;
  size_t value_dim_;
  size_t max_events_;
  double alpha_;
  double delta_;
  int64_t m_;
  double noise_scale_;
  SampleCounts samples_;
  RngStream laplace_;
  size_t queries_issued_ = 0;
  BinSet queried_;
};

}  // namespace mccal

#endif  // MCCAL_ESTIMATION_H_
