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

#include "mccal/evaluator.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "mccal/errors.h"

namespace mccal {
namespace {

// A point with weight w whose label law is `labels` (a conditional for
// exact evaluation, a one-hot vector for samples).
struct WeightedPoint {
  size_t feature;
  double weight;
  std::vector<double> labels;
};

double SquaredDistanceToLabels(const ProbVector& pred,
                               const std::vector<double>& labels) {
  // E_y ||pred - e_y||^2 = sum_j labels_j ||pred - e_j||^2.
  double norm2 = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) norm2 += pred[i] * pred[i];
  double out = 0.0;
  for (size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] == 0.0) continue;
    out += labels[j] * (norm2 - 2.0 * pred[j] + 1.0);
  }
  return out;
}

ErrorReport BuildReport(const std::vector<WeightedPoint>& points,
                        const Predictor& h, int lambda,
                        std::span<const NormExponent> ps, const Predictor* f) {
  std::map<LevelSet, std::vector<double>> signed_sums;
  ErrorReport report;
  report.lambda = lambda;
  double sq_h = 0.0;
  double sq_f = 0.0;
  for (const WeightedPoint& pt : points) {
    if (pt.weight <= 0.0) continue;
    const ProbVector& pred = h(pt.feature);
    auto [it, inserted] = signed_sums.try_emplace(RoundDown(pred, lambda),
                                                  std::vector<double>(pred.size(), 0.0));
    for (size_t j = 0; j < pred.size(); ++j) {
      it->second[j] += pt.weight * (pred[j] - pt.labels[j]);
    }
    sq_h += pt.weight * SquaredDistanceToLabels(pred, pt.labels);
    if (f) sq_f += pt.weight * SquaredDistanceToLabels((*f)(pt.feature), pt.labels);
  }
  for (const auto& [v, sums] : signed_sums) {
    for (size_t j = 0; j < sums.size(); ++j) {
      report.table.push_back({v, j, std::abs(sums[j])});
    }
  }
  for (const NormExponent& p : ps) {
    report.norms.emplace_back(p, LpNorm(report.table, p));
  }
  report.sq_error_h = sq_h;
  if (f) report.sq_error_f = sq_f;
  return report;
}

std::vector<WeightedPoint> ExactPoints(const World& world) {
  std::vector<WeightedPoint> points;
  points.reserve(world.n_features());
  for (size_t x = 0; x < world.n_features(); ++x) {
    points.push_back({x, world.mass(x), world.conditional(x).coords()});
  }
  return points;
}

void CheckShapes(const World& world, const Predictor& h) {
  if (h.size() != world.n_features() || h.k() != world.k()) {
    throw InvalidArgument("predictor does not match the world");
  }
}

}  // namespace

double ErrorReport::MaxError() const {
  double out = 0.0;
  for (const auto& e : table) out = std::max(out, e.error);
  return out;
}

double ErrorReport::Norm(const NormExponent& p) const {
  for (const auto& [q, value] : norms) {
    if (q == p) return value;
  }
  throw InvalidArgument("norm " + p.ToString() + " not in report");
}

double LpNorm(std::span<const BinClassError> table, const NormExponent& p) {
  if (p.is_infinite()) {
    double out = 0.0;
    for (const auto& e : table) out = std::max(out, e.error);
    return out;
  }
  if (p.num() < p.den()) throw InvalidArgument("norm exponent below 1");
  const double pv = p.value();
  double acc = 0.0;
  for (const auto& e : table) acc += std::pow(e.error, pv);
  return std::pow(acc, 1.0 / pv);
}

double ExactBinClassError(const World& world, const Predictor& h, int lambda,
                          const LevelSet& v, size_t j) {
  CheckShapes(world, h);
  double sum = 0.0;
  for (size_t x = 0; x < world.n_features(); ++x) {
    if (RoundDown(h(x), lambda) != v) continue;
    sum += world.mass(x) * (h(x)[j] - world.conditional(x)[j]);
  }
  return std::abs(sum);
}

double ExactLpError(const World& world, const Predictor& h, int lambda,
                    const NormExponent& p) {
  CheckShapes(world, h);
  const NormExponent ps[] = {p};
  return BuildReport(ExactPoints(world), h, lambda, ps, nullptr).norms[0].second;
}

double ExactSquaredError(const World& world, const Predictor& h) {
  CheckShapes(world, h);
  double out = 0.0;
  for (size_t x = 0; x < world.n_features(); ++x) {
    out += world.mass(x) *
           SquaredDistanceToLabels(h(x), world.conditional(x).coords());
  }
  return out;
}

ErrorReport ExactReport(const World& world, const Predictor& h, int lambda,
                        std::span<const NormExponent> ps, const Predictor* f) {
  CheckShapes(world, h);
  if (f) CheckShapes(world, *f);
  return BuildReport(ExactPoints(world), h, lambda, ps, f);
}

ErrorReport EmpiricalReport(std::span<const WeightedSample> samples,
                            const Predictor& h, int lambda,
                            std::span<const NormExponent> ps,
                            const Predictor* f) {
  if (samples.empty()) throw InvalidArgument("no samples");
  std::vector<WeightedPoint> points;
  points.reserve(samples.size());
  for (const WeightedSample& s : samples) {
    if (s.feature >= h.size() || s.label >= h.k()) {
      throw InvalidArgument("sample out of range");
    }
    std::vector<double> labels(h.k(), 0.0);
    labels[s.label] = 1.0;
    points.push_back({s.feature, s.weight, std::move(labels)});
  }
  return BuildReport(points, h, lambda, ps, f);
}

ErrorReport EmpiricalReport(std::span<const Sample> samples,
                            const Predictor& h, int lambda,
                            std::span<const NormExponent> ps,
                            const Predictor* f) {
  if (samples.empty()) throw InvalidArgument("no samples");
  std::vector<WeightedSample> weighted;
  weighted.reserve(samples.size());
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const Sample& s : samples) weighted.push_back({s.feature, s.label, w});
  return EmpiricalReport(weighted, h, lambda, ps, f);
}

BoundChecks CheckBounds(const ErrorReport& report, const NormExponent& p,
                        double epsilon, double beta) {
  if (!report.sq_error_f) {
    throw InvalidArgument("bound checks need the squared error of f");
  }
  BoundChecks c;
  c.max_bin_error = report.MaxError();
  c.per_bin = c.max_bin_error <= beta;
  const double norm = report.Norm(p);
  if (p.is_infinite()) {
    c.aggregate = norm;
    c.aggregate_bound = beta;
  } else {
    c.aggregate = std::pow(norm, p.value());
    c.aggregate_bound = 2.0 * std::pow(beta, p.value() - 1.0);
  }
  c.aggregate_ok = c.aggregate <= c.aggregate_bound;
  c.within_epsilon = norm <= epsilon;
  c.sq_error_increase = report.sq_error_h - *report.sq_error_f;
  c.sq_error_budget = SquaredErrorBudget(beta, report.lambda);
  c.squared_error = c.sq_error_increase <= c.sq_error_budget;
  return c;
}

EventCheck CheckEstimationEvents(const World& world, const Predictor& f,
                                 const CalibrationResult& result) {
  const CalibParams& params = result.params;
  const int lambda = params.lambda;
  EventCheck out;
  std::map<LevelSet, double> truth;
  for (size_t x = 0; x < world.n_features(); ++x) {
    truth[RoundDown(f(x), lambda)] += world.mass(x);
  }
  for (const auto& [v, mu] : result.bin_masses.estimates()) truth.try_emplace(v, 0.0);
  for (const auto& [v, p] : truth) {
    out.a1_max_deviation =
        std::max(out.a1_max_deviation, std::abs(result.bin_masses.Get(v) - p));
  }
  out.a1 = out.a1_max_deviation <= params.a1_accuracy;
  for (const MGroupRecord& rec : result.m_history) {
    const EventStats exact = ExactEventStats(world, f, lambda, rec.bins);
    out.a2_max_deviation =
        std::max(out.a2_max_deviation, std::abs(rec.p_hat - exact.mass));
    for (size_t j = 0; j < rec.e_hat.size(); ++j) {
      out.a3_max_deviation = std::max(
          out.a3_max_deviation, std::abs(rec.e_hat[j] - exact.mean_label[j]));
    }
  }
  out.a2 = out.a2_max_deviation <= params.pool_accuracy;
  out.a3 = out.a3_max_deviation <= params.pool_accuracy;
  if (result.m_history.empty()) out.a2 = out.a3 = true;
  return out;
}

}  // namespace mccal
