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

#ifndef MCCAL_SIMPLEX_H_
#define MCCAL_SIMPLEX_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mccal {

// Tolerance for membership in the probability simplex.
inline constexpr double kSimplexTolerance = 1e-9;

// Default refusal threshold for enumerate_levels, in units of C(lambda+k, k).
inline constexpr uint64_t kDefaultEnumerationCap = 20'000'000;

bool IsProbVector(std::span<const double> coords,
                  double tolerance = kSimplexTolerance);

// A point of the probability simplex: k nonnegative coordinates summing to 1.
// Construction validates; the stored coordinates are never renormalized.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> coords);

  size_t size() const { return coords_.size(); }
  double operator[](size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> coords_;
};

ProbVector OneHot(size_t k, size_t label);

// A grid vector of multiples of 1/lambda, stored as integer numerators so
// bins compare and hash exactly. Construction checks the grid range only;
// membership in V_lambda^k is checked by IsMember.
class LevelSet {
 public:
  LevelSet() = default;
  LevelSet(std::vector<int> numerators, int lambda);

  int lambda() const { return lambda_; }
  size_t size() const { return numerators_.size(); }
  const std::vector<int>& numerators() const { return numerators_; }
  int numerator_sum() const;
  double coord(size_t i) const {
    return static_cast<double>(numerators_[i]) / lambda_;
  }
  std::vector<double> ToReal() const;
  // Comma-separated numerators, e.g. "0,1,3".
  std::string ToString() const;

  friend auto operator<=>(const LevelSet&, const LevelSet&) = default;
  friend bool operator==(const LevelSet&, const LevelSet&) = default;

 private:
  std::vector<int> numerators_;
  int lambda_ = 1;
};

struct LevelSetHash {
  size_t operator()(const LevelSet& v) const;
};

using BinSet = std::set<LevelSet>;

// Coordinatewise floor onto the 1/lambda grid. Bin n of a coordinate is
// [double(n/lambda), double((n+1)/lambda)), so exact grid multiples map to
// themselves even when u*lambda rounds below the integer.
LevelSet RoundDown(const ProbVector& u, int lambda);

// True iff some u in the simplex rounds down to v:
// sum(v) <= 1 and sum(v) + k/lambda > 1.
bool IsMember(const LevelSet& v);

// The equal-spread closest lift v + (d/k)(1,...,1), d = 1 - sum(v).
// Throws MembershipError for non-members.
ProbVector Canonical(const LevelSet& v);

// Euclidean projection onto the simplex (sort and threshold).
ProbVector ProjectSimplex(std::span<const double> z);

// |V_lambda^k| by counting compositions: sum over s in [max(0, lambda-k+1),
// lambda] of C(s+k-1, k-1). Saturates at UINT64_MAX.
uint64_t CountLevels(int lambda, int k);

// Saturating C(n, r).
uint64_t Binomial(uint64_t n, uint64_t r);

// All members of V_lambda^k in lexicographic order of numerators. Throws
// CombinatorialLimitError when C(lambda+k, k) exceeds `cap`.
std::vector<LevelSet> EnumerateLevels(int lambda, int k,
                                      uint64_t cap = kDefaultEnumerationCap);

}  // namespace mccal

#endif  // MCCAL_SIMPLEX_H_
