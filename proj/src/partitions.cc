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

#include "mccal/partitions.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "mccal/errors.h"

namespace mccal {
namespace {

std::string Describe(const BinSet& bins) {
  std::string out = "{";
  for (const LevelSet& v : bins) {
    if (out.size() > 1) out += "; ";
    out += v.ToString();
  }
  return out + "}";
}

}  // namespace

std::vector<double> EstimatedErrors(const Aggregate& agg,
                                    const ProbVector& pred) {
  std::vector<double> err(pred.size());
  for (size_t j = 0; j < pred.size(); ++j) {
    err[j] = std::abs(agg.p_hat * pred[j] - agg.e_hat[j]);
  }
  return err;
}

size_t NumSizeClasses(size_t n) {
  if (n == 0) return 0;
  return static_cast<size_t>(std::bit_width(n));
}

MStructure::MStructure(const BinSet& bins, std::vector<PoolPair> pools,
                       const Predictor& f, int lambda)
    : bins_(bins),
      pools_(std::move(pools)),
      max_constituents_(NumSizeClasses(bins.size())) {
  if (bins_.empty()) throw InvalidArgument("M needs at least one bin");
  if (pools_.size() < max_constituents_) {
    throw InvalidArgument("M needs one pool pair per size class");
  }
  for (const LevelSet& v : bins_) Create(BinSet{v}, f, lambda);
}

GroupId MStructure::Create(BinSet bins, const Predictor& f, int lambda) {
  const size_t size = bins.size();
  if (!std::has_single_bit(size)) {
    throw InvariantViolation("M group size " + std::to_string(size) +
                             " is not a power of two");
  }
  const size_t size_class = static_cast<size_t>(std::countr_zero(size));
  if (size_class >= pools_.size()) {
    throw InvariantViolation("no pool for M size class " +
                             std::to_string(size_class));
  }
  PoolPair& pools = pools_[size_class];
  MGroupRecord rec;
  rec.id = next_id_++;
  rec.size_class = size_class;
  rec.p_hat = pools.probability.Query(bins, f, lambda).front();
  rec.e_hat = pools.label.Query(bins, f, lambda);
  for (const LevelSet& v : bins) owner_[v] = rec.id;
  rec.bins = std::move(bins);
  const GroupId id = rec.id;
  history_.emplace(id, std::move(rec));
  return id;
}

Aggregate MStructure::Sum(const BinSet& bins) const {
  std::set<GroupId> parts;
  for (const LevelSet& v : bins) {
    auto it = owner_.find(v);
    if (it == owner_.end()) {
      throw InvariantViolation("bin (" + v.ToString() + ") is not in B");
    }
    parts.insert(it->second);
  }
  Aggregate agg;
  size_t covered = 0;
  for (GroupId id : parts) {
    const MGroupRecord& rec = history_.at(id);
    for (const LevelSet& v : rec.bins) {
      if (!bins.contains(v)) {
        throw InvariantViolation("bin set " + Describe(bins) +
                                 " splits M group " + std::to_string(id));
      }
    }
    covered += rec.bins.size();
    agg.p_hat += rec.p_hat;
    if (agg.e_hat.empty()) agg.e_hat.assign(rec.e_hat.size(), 0.0);
    for (size_t j = 0; j < rec.e_hat.size(); ++j) agg.e_hat[j] += rec.e_hat[j];
  }
  if (covered != bins.size()) {
    throw InvariantViolation("bin set is not a union of M groups");
  }
  agg.constituents = parts.size();
  if (agg.constituents > max_constituents_) {
    throw InvariantViolation(
        "bin set aggregates " + std::to_string(agg.constituents) +
        " M groups, more than " + std::to_string(max_constituents_));
  }
  return agg;
}

std::vector<MMergeEvent> MStructure::MergePass(const BinSet& target,
                                               const Predictor& f,
                                               int lambda) {
  // Current constituents keyed by (size, id).
  std::set<std::pair<size_t, GroupId>> parts;
  for (const LevelSet& v : target) {
    const GroupId id = owner_.at(v);
    parts.emplace(history_.at(id).bins.size(), id);
  }
  size_t covered = 0;
  for (const auto& [size, id] : parts) covered += size;
  if (covered != target.size()) {
    throw InvariantViolation("merge target is not a union of M groups");
  }

  std::vector<MMergeEvent> events;
  while (true) {
    auto first = parts.end();
    for (auto it = parts.begin(); it != parts.end(); ++it) {
      auto next = std::next(it);
      if (next != parts.end() && next->first == it->first) {
        first = it;
        break;
      }
    }
    if (first == parts.end()) break;
    auto second = std::next(first);
    const GroupId a = first->second;
    const GroupId b = second->second;
    BinSet merged = history_.at(a).bins;
    merged.insert(history_.at(b).bins.begin(), history_.at(b).bins.end());
    history_.at(a).current = false;
    history_.at(b).current = false;
    parts.erase(first);
    parts.erase(second);
    const size_t size = merged.size();
    const GroupId id = Create(std::move(merged), f, lambda);
    parts.emplace(size, id);
    events.push_back({a, b, id, size});
  }
  return events;
}

std::vector<GroupId> MStructure::CurrentGroups() const {
  std::vector<GroupId> out;
  for (const auto& [id, rec] : history_) {
    if (rec.current) out.push_back(id);
  }
  return out;
}

void MStructure::CheckInvariants() const {
  BinSet seen;
  for (const auto& [id, rec] : history_) {
    if (!std::has_single_bit(rec.bins.size())) {
      throw InvariantViolation("M group " + std::to_string(id) +
                               " has non power-of-two size");
    }
    if (!rec.current) continue;
    for (const LevelSet& v : rec.bins) {
      if (!seen.insert(v).second) {
        throw InvariantViolation("current M groups overlap at (" +
                                 v.ToString() + ")");
      }
      if (owner_.at(v) != id) {
        throw InvariantViolation("M owner map is stale");
      }
    }
  }
  if (seen != bins_) {
    throw InvariantViolation("current M groups do not cover B");
  }
  std::vector<size_t> per_class(pools_.size(), 0);
  std::vector<BinSet> union_by_class(pools_.size());
  for (const auto& [id, rec] : history_) {
    ++per_class[rec.size_class];
    for (const LevelSet& v : rec.bins) {
      if (!union_by_class[rec.size_class].insert(v).second) {
        throw InvariantViolation("two M groups of size " +
                                 std::to_string(rec.bins.size()) +
                                 " share bin (" + v.ToString() + ")");
      }
    }
  }
  for (size_t i = 0; i < pools_.size(); ++i) {
    if (pools_[i].probability.queries_issued() != per_class[i] ||
        pools_[i].label.queries_issued() != per_class[i]) {
      throw InvariantViolation("size class " + std::to_string(i) +
                               " query count does not match its groups");
    }
  }
}

GroupId MergeWinner(GroupId selected, double selected_mass, GroupId partner,
                    double partner_mass) {
  return selected_mass <= partner_mass ? partner : selected;
}

GStructure::GStructure(const BinSet& bins, const MStructure& m, int lambda)
    : lambda_(lambda), bins_(bins) {
  for (const LevelSet& v : bins_) {
    GGroup g;
    g.id = next_id_++;
    g.bins = {v};
    g.pred = Canonical(v);
    g.err = EstimatedErrors(m.Sum(g.bins), g.pred);
    owner_[v] = g.id;
    groups_.emplace(g.id, std::move(g));
  }
}

std::optional<GroupId> GStructure::FindCollision(const LevelSet& level,
                                                 GroupId exclude) const {
  std::optional<GroupId> found;
  for (const auto& [id, g] : groups_) {
    if (id == exclude) continue;
    if (RoundDown(g.pred, lambda_) != level) continue;
    if (found) {
      throw InvariantViolation("groups " + std::to_string(*found) + " and " +
                               std::to_string(id) + " share level set (" +
                               level.ToString() + ")");
    }
    found = id;
  }
  return found;
}

GroupId GStructure::Merge(GroupId a, GroupId b, ProbVector winner_pred) {
  if (a == b) throw InvalidArgument("cannot merge a group with itself");
  GGroup ga = groups_.at(a);
  const GGroup& gb = groups_.at(b);
  GGroup merged;
  merged.id = next_id_++;
  merged.bins = ga.bins;
  merged.bins.insert(gb.bins.begin(), gb.bins.end());
  merged.pred = std::move(winner_pred);
  merged.err = std::move(ga.err);
  for (const LevelSet& v : merged.bins) owner_[v] = merged.id;
  groups_.erase(a);
  groups_.erase(b);
  const GroupId id = merged.id;
  groups_.emplace(id, std::move(merged));
  return id;
}

void GStructure::SetPrediction(GroupId id, ProbVector pred) {
  groups_.at(id).pred = std::move(pred);
}

void GStructure::SetErrors(GroupId id, std::vector<double> err) {
  groups_.at(id).err = std::move(err);
}

void GStructure::CheckInvariants(const MStructure& m) const {
  BinSet seen;
  std::set<LevelSet> levels;
  for (const auto& [id, g] : groups_) {
    for (const LevelSet& v : g.bins) {
      if (!seen.insert(v).second) {
        throw InvariantViolation("G groups overlap at (" + v.ToString() + ")");
      }
    }
    if (!levels.insert(RoundDown(g.pred, lambda_)).second) {
      throw InvariantViolation("two G groups round to the same level set");
    }
  }
  if (seen != bins_) throw InvariantViolation("G groups do not cover B");
  for (GroupId mid : m.CurrentGroups()) {
    const BinSet& bins = m.record(mid).bins;
    const GroupId owner = owner_.at(*bins.begin());
    for (const LevelSet& v : bins) {
      if (owner_.at(v) != owner) {
        throw InvariantViolation("M group " + std::to_string(mid) +
                                 " straddles two G groups");
      }
    }
  }
}

}  // namespace mccal
