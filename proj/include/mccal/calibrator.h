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

#ifndef MCCAL_CALIBRATOR_H_
#define MCCAL_CALIBRATOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mccal/estimation.h"
#include "mccal/norm.h"
#include "mccal/partitions.h"
#include "mccal/simplex.h"
#include "mccal/world.h"

namespace mccal {

// Parameters of one calibration run. Fields after `a1_accuracy` depend on
// |B| and are filled in by FinalizeParams.
struct CalibParams {
  NormExponent p = NormExponent::Infinity();
  double epsilon = 0.0;
  double delta = 0.0;
  double beta = 0.0;             // eps^{p/(p-1)} * 2^{-1/(p-1)}
  int lambda = 1;                // ceil(1/beta)
  double error_threshold = 0.0;  // beta/2
  double bin_threshold = 0.0;    // beta/6
  double a1_accuracy = 0.0;      // beta/12
  double a1_delta = 0.0;         // delta/3
  int64_t t_max = 0;

  size_t num_high_bins = 0;
  size_t size_classes = 0;      // floor(log2|B|) + 1
  double pool_accuracy = 0.0;   // beta / (36 size_classes)
  double pool_delta = 0.0;      // delta / (3 size_classes)
};

// Throws InvalidArgument unless p > 1 (or infinite) and eps, delta in (0,1).
CalibParams DeriveParams(NormExponent p, double epsilon, double delta);
void FinalizeParams(CalibParams& params, size_t num_high_bins);

double ComputeBeta(NormExponent p, double epsilon);
// ceil(1/beta), snapping 1/beta to an integer when within 1e-9 relative.
int LambdaFor(double beta);
// ceil((9 + (36/lambda) log2(36/beta)) / beta^2).
int64_t IterationBound(double beta, int lambda);
// log2(36/beta): the most times one bin can sit on the moved side of a merge.
double MoveBound(double beta);
// (4/lambda)(1 + log2(36/beta)): allowed growth of the squared error.
double SquaredErrorBudget(double beta, int lambda);

// {v : mu_hat(v) >= beta/6}.
BinSet SelectBins(const BinMassTable& masses, const CalibParams& params);

// Sample sizes. In auto mode they follow the accuracy and failure budgets;
// in manual mode every pool uses `pool_samples`.
struct SamplePlan {
  bool manual = false;
  int64_t a1_samples = 0;
  int64_t pool_samples = 0;
};

struct CalibrationOptions {
  uint64_t seed = 0;
  SamplePlan plan;
  bool check_invariants = true;
};

// h: bins of B route to their final G prediction; every other bin maps to
// Canonical(R(f(x))).
class CalibratedPredictor {
 public:
  CalibratedPredictor(Predictor base, int lambda,
                      std::map<LevelSet, ProbVector> routing);

  ProbVector Apply(size_t x) const;
  ProbVector ApplyToLevel(const LevelSet& v) const;
  Predictor ToPredictor() const;

  const Predictor& base() const { return base_; }
  int lambda() const { return lambda_; }
  const std::map<LevelSet, ProbVector>& routing() const { return routing_; }

 private:
  Predictor base_;
  int lambda_;
  std::map<LevelSet, ProbVector> routing_;
};

enum class MovedSide { kNone, kSelected, kPartner };

struct IterationRecord {
  int64_t t = 0;
  GroupId group_id = 0;
  BinSet bins;  // S^(t) before any merge
  size_t j = 0;
  double est_error = 0.0;
  double z_j = 0.0;
  ProbVector projected;  // pi(z^(t))
  std::optional<GroupId> g_partner;
  MovedSide moved = MovedSide::kNone;
  GroupId result_group = 0;
  ProbVector final_pred;
  std::vector<MMergeEvent> m_merges;
  std::vector<double> new_errors;
};

struct PoolSummary {
  std::string name;
  int64_t m = 0;
  double alpha = 0.0;
  double delta = 0.0;
  double noise_scale = 0.0;
  size_t max_events = 0;
  size_t value_dim = 0;
  size_t queries = 0;
};

struct RunTrace {
  std::vector<IterationRecord> iterations;
  int64_t a1_samples = 0;
  std::vector<PoolSummary> pools;
  double wall_seconds = 0.0;
};

struct CalibrationResult {
  CalibratedPredictor h;
  RunTrace trace;
  CalibParams params;
  BinMassTable bin_masses;
  BinSet high_bins;
  // Every M group that ever existed, with its estimates.
  std::vector<MGroupRecord> m_history;
  // Times each bin of B was on the moved side of a G merge.
  std::map<LevelSet, int> moves;
  size_t max_constituents_seen = 0;
  // G at termination, including the cached errors.
  std::vector<GGroup> final_groups;
};

// Runs the recalibration loop on samples from `world`. Throws
// EstimateFailure on a nonpositive aggregated mass, IterationLimitExceeded
// past params.t_max and InvariantViolation on structural bugs.
CalibrationResult Calibrate(const World& world, const Predictor& f,
                            const CalibParams& params,
                            const CalibrationOptions& options);

}  // namespace mccal

#endif  // MCCAL_CALIBRATOR_H_
