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

#ifndef MCCAL_EVALUATOR_H_
#define MCCAL_EVALUATOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mccal/calibrator.h"
#include "mccal/norm.h"
#include "mccal/simplex.h"
#include "mccal/world.h"

namespace mccal {

struct BinClassError {
  LevelSet bin;
  size_t j = 0;
  double error = 0.0;
};

// Calibration and squared error of a predictor h. Bins are R(h(x)), the
// evaluated predictor's own level sets.
struct ErrorReport {
  int lambda = 1;
  // Every (v, j) with v in the range of R(h) on positive-weight points.
  std::vector<BinClassError> table;
  std::vector<std::pair<NormExponent, double>> norms;
  double sq_error_h = 0.0;
  std::optional<double> sq_error_f;

  double MaxError() const;
  // Throws InvalidArgument if `p` was not requested.
  double Norm(const NormExponent& p) const;
};

// Err(h, v, j) = |sum_x mass(x) (h(x)_j - q(x)_j) 1[R(h(x)) = v]|.
double ExactBinClassError(const World& world, const Predictor& h, int lambda,
                          const LevelSet& v, size_t j);
double ExactLpError(const World& world, const Predictor& h, int lambda,
                    const NormExponent& p);
// sum_x mass(x) sum_j q(x)_j ||h(x) - e_j||^2.
double ExactSquaredError(const World& world, const Predictor& h);

// Norm over a finite list of per-(v, j) errors.
double LpNorm(std::span<const BinClassError> table, const NormExponent& p);

ErrorReport ExactReport(const World& world, const Predictor& h, int lambda,
                        std::span<const NormExponent> ps,
                        const Predictor* f = nullptr);

struct WeightedSample {
  size_t feature = 0;
  size_t label = 0;
  double weight = 0.0;
};

// Same formulas with sample weights in place of exact masses and observed
// one-hot labels in place of conditionals.
ErrorReport EmpiricalReport(std::span<const WeightedSample> samples,
                            const Predictor& h, int lambda,
                            std::span<const NormExponent> ps,
                            const Predictor* f = nullptr);
// Uniform weights 1/n.
ErrorReport EmpiricalReport(std::span<const Sample> samples,
                            const Predictor& h, int lambda,
                            std::span<const NormExponent> ps,
                            const Predictor* f = nullptr);

struct BoundChecks {
  double max_bin_error = 0.0;
  double aggregate = 0.0;        // Err_p(h)^p, or Err_inf(h) when p = inf
  double aggregate_bound = 0.0;  // 2 beta^{p-1}, or beta when p = inf
  double sq_error_increase = 0.0;
  double sq_error_budget = 0.0;
  bool per_bin = false;          // every Err(h, v, j) <= beta
  bool aggregate_ok = false;
  bool within_epsilon = false;   // Err_p(h) <= epsilon
  bool squared_error = false;
};

// `report` must come from ExactReport with f supplied and p requested.
BoundChecks CheckBounds(const ErrorReport& report, const NormExponent& p,
                        double epsilon, double beta);

// Largest deviations of a run's estimates from the exact values: A1 over
// every bin with a nonzero estimate or nonzero true mass, A2/A3 over every M
// group in the history.
struct EventCheck {
  double a1_max_deviation = 0.0;
  double a2_max_deviation = 0.0;
  double a3_max_deviation = 0.0;
  bool a1 = true;  // <= beta/12
  bool a2 = true;  // <= pool accuracy
  bool a3 = true;
  bool all() const { return a1 && a2 && a3; }
};

EventCheck CheckEstimationEvents(const World& world, const Predictor& f,
                                 const CalibrationResult& result);

}  // namespace mccal

#endif  // MCCAL_EVALUATOR_H_
