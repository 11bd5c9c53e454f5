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

#include "mccal/simplex.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "mccal/errors.h"

namespace mccal {

bool IsProbVector(std::span<const double> coords, double tolerance) {
  if (coords.empty()) return false;
  double sum = 0.0;
  for (double c : coords) {
    if (!std::isfinite(c) || c < -tolerance || c > 1.0 + tolerance) {
      return false;
    }
    sum += c;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

ProbVector::ProbVector(std::vector<double> coords) : coords_(std::move(coords)) {
  if (!IsProbVector(coords_)) {
    std::ostringstream msg;
    msg << "not a probability vector: (";
    for (size_t i = 0; i < coords_.size(); ++i) {
      msg << (i ? ", " : "") << coords_[i];
    }
    msg << ")";
    throw InvalidArgument(msg.str());
  }
}

ProbVector OneHot(size_t k, size_t label) {
  if (label >= k) throw InvalidArgument("label out of range");
  std::vector<double> e(k, 0.0);
  e[label] = 1.0;
  return ProbVector(std::move(e));
}

LevelSet::LevelSet(std::vector<int> numerators, int lambda)
    : numerators_(std::move(numerators)), lambda_(lambda) {
  if (lambda_ < 1) throw InvalidArgument("lambda must be >= 1");
  if (numerators_.empty()) throw InvalidArgument("empty level set");
  for (int n : numerators_) {
    if (n < 0 || n > lambda_) {
      throw InvalidArgument("level-set numerator outside [0, lambda]");
    }
  }
}

int LevelSet::numerator_sum() const {
  return std::accumulate(numerators_.begin(), numerators_.end(), 0);
}

std::vector<double> LevelSet::ToReal() const {
  std::vector<double> out(numerators_.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = coord(i);
  return out;
}

std::string LevelSet::ToString() const {
  std::string out;
  for (size_t i = 0; i < numerators_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(numerators_[i]);
  }
  return out;
}

size_t LevelSetHash::operator()(const LevelSet& v) const {
  size_t h = std::hash<int>()(v.lambda());
  for (int n : v.numerators()) {
    h ^= std::hash<int>()(n) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

int GridIndex(double u, int lambda) {
  if (!(u > 0.0)) return 0;
  if (u >= 1.0) return lambda;
  int n = static_cast<int>(std::floor(u * lambda));
  n = std::clamp(n, 0, lambda);
  while (n < lambda && static_cast<double>(n + 1) / lambda <= u) ++n;
  while (n > 0 && static_cast<double>(n) / lambda > u) --n;
  return n;
}

}  // namespace

LevelSet RoundDown(const ProbVector& u, int lambda) {
  if (lambda < 1) throw InvalidArgument("lambda must be >= 1");
  std::vector<int> num(u.size());
  for (size_t i = 0; i < u.size(); ++i) num[i] = GridIndex(u[i], lambda);
  return LevelSet(std::move(num), lambda);
}

bool IsMember(const LevelSet& v) {
  const int s = v.numerator_sum();
  return s <= v.lambda() && s + static_cast<int>(v.size()) > v.lambda();
}

ProbVector Canonical(const LevelSet& v) {
  if (!IsMember(v)) {
    throw MembershipError("not a level set of V_lambda^k: (" + v.ToString() +
                          ") / " + std::to_string(v.lambda()));
  }
  const int k = static_cast<int>(v.size());
  const int slack = v.lambda() - v.numerator_sum();
  if (slack == 0) return ProbVector(v.ToReal());
  std::vector<double> out(v.size());
  const double spread = static_cast<double>(slack) / k;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = (v.numerators()[i] + spread) / v.lambda();
  }
  return ProbVector(std::move(out));
}

ProbVector ProjectSimplex(std::span<const double> z) {
  if (z.empty()) throw InvalidArgument("cannot project an empty vector");
  for (double c : z) {
    if (!std::isfinite(c)) throw InvalidArgument("non-finite coordinate");
  }
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    prefix += sorted[i];
    const double candidate = (prefix - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = std::max(z[i] - theta, 0.0);
  return ProbVector(std::move(out));
}

uint64_t Binomial(uint64_t n, uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  uint64_t result = 1;
  for (uint64_t i = 1; i <= r; ++i) {
    // result * (n - r + i) / i is exact at every step.
    const uint64_t factor = n - r + i;
    const uint64_t g = std::gcd(result, i);
    const uint64_t a = result / g;
    const uint64_t b = factor / (i / g);
    if (a != 0 && b > kMax / a) return kMax;
    result = a * b;
  }
  return result;
}

uint64_t CountLevels(int lambda, int k) {
  if (lambda < 1 || k < 1) throw InvalidArgument("lambda and k must be >= 1");
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  uint64_t total = 0;
  for (int s = std::max(0, lambda - k + 1); s <= lambda; ++s) {
    const uint64_t c = Binomial(static_cast<uint64_t>(s + k - 1),
                                static_cast<uint64_t>(k - 1));
    if (c == kMax || total > kMax - c) return kMax;
    total += c;
  }
  return total;
}

namespace {

void EnumerateRec(int lambda, int k, std::vector<int>& prefix, int sum,
                  std::vector<LevelSet>& out) {
  const int pos = static_cast<int>(prefix.size());
  if (pos == k) {
    if (sum + k > lambda) out.emplace_back(prefix, lambda);
    return;
  }
  for (int n = 0; sum + n <= lambda; ++n) {
    prefix.push_back(n);
    EnumerateRec(lambda, k, prefix, sum + n, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<LevelSet> EnumerateLevels(int lambda, int k, uint64_t cap) {
  if (lambda < 1 || k < 1) throw InvalidArgument("lambda and k must be >= 1");
  const uint64_t bound = Binomial(static_cast<uint64_t>(lambda + k),
                                  static_cast<uint64_t>(k));
  if (bound > cap) {
    throw CombinatorialLimitError(
        "C(lambda+k, k) = " + std::to_string(bound) + " exceeds the cap " +
        std::to_string(cap));
  }
  std::vector<LevelSet> out;
  out.reserve(static_cast<size_t>(CountLevels(lambda, k)));
  std::vector<int> prefix;
  prefix.reserve(k);
  EnumerateRec(lambda, k, prefix, 0, out);
  return out;
}

}  // namespace mccal
