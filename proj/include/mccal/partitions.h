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

#ifndef MCCAL_PARTITIONS_H_
#define MCCAL_PARTITIONS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mccal/estimation.h"
#include "mccal/simplex.h"
#include "mccal/world.h"

namespace mccal {

// Stable, creation-ordered group identifier. M and G number independently.
using GroupId = int64_t;

// One P-hat pool and one E-hat pool serving all M groups of size 2^i.
struct PoolPair {
  DisjointQueryPool probability;
  DisjointQueryPool label;
};

// Every M group ever created, with the estimates its single query produced.
struct MGroupRecord {
  GroupId id = 0;
  BinSet bins;
  size_t size_class = 0;  // log2(|bins|)
  double p_hat = 0.0;
  std::vector<double> e_hat;
  bool current = true;
};

struct MMergeEvent {
  GroupId first = 0;
  GroupId second = 0;
  GroupId merged = 0;
  size_t merged_size = 0;
};

// Sums of stored M estimates over the constituents of a bin set.
struct Aggregate {
  double p_hat = 0.0;
  std::vector<double> e_hat;
  size_t constituents = 0;
};

// |P * pred_j - E_j| for every class j.
std::vector<double> EstimatedErrors(const Aggregate& agg,
                                    const ProbVector& pred);

// floor(log2(n)) + 1 for n >= 1: the number of power-of-two sizes up to n.
size_t NumSizeClasses(size_t n);

// The estimation structure: a merge-only partition of B into power-of-two
// groups. Equal-size groups are merged until a target's constituent sizes
// are distinct, so any G group aggregates at most NumSizeClasses(|B|)
// estimates. Each size class owns one PoolPair.
class MStructure {
 public:
  // Singleton groups for every bin of `bins`, estimated on pools[0].
  MStructure(const BinSet& bins, std::vector<PoolPair> pools,
             const Predictor& f, int lambda);

  // Throws InvariantViolation when `bins` is not a disjoint union of current
  // groups or needs more than NumSizeClasses(|B|) of them.
  Aggregate Sum(const BinSet& bins) const;

  // Merges equal-size groups inside `target`, smallest size first and
  // smallest ids first, querying each new group on its size class's pools.
  std::vector<MMergeEvent> MergePass(const BinSet& target, const Predictor& f,
                                     int lambda);

  GroupId GroupOf(const LevelSet& bin) const { return owner_.at(bin); }
  std::vector<GroupId> CurrentGroups() const;
  const MGroupRecord& record(GroupId id) const { return history_.at(id); }
  const std::map<GroupId, MGroupRecord>& history() const { return history_; }
  const std::vector<PoolPair>& pools() const { return pools_; }
  const BinSet& bins() const { return bins_; }
  size_t max_constituents() const { return max_constituents_; }

  // Power-of-two sizes, exact partition of B, pairwise disjointness of all
  // equal-size groups in the history, one query per group per pool.
  void CheckInvariants() const;

 private:
  GroupId Create(BinSet bins, const Predictor& f, int lambda);

  BinSet bins_;
  std::vector<PoolPair> pools_;
  std::map<GroupId, MGroupRecord> history_;
  std::map<LevelSet, GroupId> owner_;
  GroupId next_id_ = 0;
  size_t max_constituents_;
};

struct GGroup {
  GroupId id = 0;
  BinSet bins;
  ProbVector pred;
  std::vector<double> err;  // cached estimated error per class
};

// The group whose prediction survives a G merge: the partner when the
// selected group's aggregated mass is <= the partner's, else the selected.
GroupId MergeWinner(GroupId selected, double selected_mass, GroupId partner,
                    double partner_mass);

// The prediction structure: a merge-only partition of B carrying one
// prediction and one cached error vector per group.
class GStructure {
 public:
  // Singletons {v} with pred = Canonical(v) and errors from `m`.
  GStructure(const BinSet& bins, const MStructure& m, int lambda);

  // The group other than `exclude` whose prediction rounds to `level`.
  // Throws InvariantViolation if more than one exists.
  std::optional<GroupId> FindCollision(const LevelSet& level,
                                       GroupId exclude) const;

  // Replaces groups a and b by a new group with prediction `winner_pred`.
  // The merged group keeps a's cached errors until the caller recomputes them.
  GroupId Merge(GroupId a, GroupId b, ProbVector winner_pred);

  void SetPrediction(GroupId id, ProbVector pred);
  void SetErrors(GroupId id, std::vector<double> err);

  const GGroup& group(GroupId id) const { return groups_.at(id); }
  const std::map<GroupId, GGroup>& groups() const { return groups_; }
  GroupId GroupOf(const LevelSet& bin) const { return owner_.at(bin); }
  int lambda() const { return lambda_; }

  // Exact partition of B, pairwise distinct rounded predictions, and every
  // current M group contained in a single G group.
  void CheckInvariants(const MStructure& m) const;

 private:
  int lambda_;
  BinSet bins_;
  std::map<GroupId, GGroup> groups_;
  std::map<LevelSet, GroupId> owner_;
  GroupId next_id_ = 0;
};

}  // namespace mccal

#endif  // MCCAL_PARTITIONS_H_
