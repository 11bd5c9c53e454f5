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

#ifndef MCCAL_EXPERIMENT_H_
#define MCCAL_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mccal/calibrator.h"
#include "mccal/evaluator.h"
#include "mccal/norm.h"

namespace mccal {

// One end-to-end experiment. Serialized as JSON:
//   {"scenario": {"name": "random-miscalibrated", "k": 3, "n_features": 40},
//    "p": "inf", "epsilon": 0.25, "delta": 0.1, "seed": 7,
//    "sample_mode": "auto" | {"manual": {"a1_samples": N, "pool_samples": M}},
//    "report": "report.json", "trace": "trace.csv", "h_out": "h.json"}
// Only "epsilon" is required; the rest default as below.
struct RunConfig {
  std::string scenario = "random-miscalibrated";
  size_t k = 3;
  size_t n_features = 40;
  NormExponent p = NormExponent::Infinity();
  double epsilon = 0.0;
  double delta = 0.1;
  uint64_t seed = 0;
  SamplePlan plan;
  bool check_invariants = true;
  std::string report_path;
  std::string trace_path;
  std::string h_path;

  static RunConfig FromJson(const nlohmann::json& doc);
  nlohmann::json ToJson() const;
  // Throws InvalidArgument on any out-of-range field.
  void Validate() const;
};

enum class RunStatus { kOk, kEstimateFailure, kIterationLimit };

struct RunOutcome {
  RunStatus status = RunStatus::kOk;
  std::string message;
  nlohmann::json report;
  std::string trace_csv;
  std::optional<CalibrationResult> result;
  std::optional<Predictor> h_table;
  std::optional<EventCheck> events;
  std::optional<BoundChecks> checks;
  int max_moves = 0;
};

// Scenario, sampling, calibration and exact evaluation, without touching
// the filesystem. Invalid configs throw InvalidArgument; estimate failures
// and iteration-limit breaches are reported through `status`.
RunOutcome Execute(const RunConfig& config);

// Execute plus writing report/trace/h files. Returns the process exit code.
int Run(const RunConfig& config);

std::string TraceToCsv(const RunTrace& trace);

struct SweepGrid {
  std::vector<double> epsilons;
  std::vector<NormExponent> ps;
  std::vector<uint64_t> seeds;
};

struct SweepRow {
  size_t cell = 0;
  double epsilon = 0.0;
  std::string p;
  uint64_t seed = 0;
  std::string status;  // "ok", "estimate_failure", "iteration_limit", "error"
  int64_t iterations = -1;
  double err_inf_h = -1.0;
  double err_p_h = -1.0;
  double sq_increase = 0.0;
  bool per_bin = false;
  bool aggregate = false;
  bool squared_error = false;
  bool events = false;
  std::string message;

  bool passed() const { return status == "ok" && per_bin && aggregate && squared_error; }
};

// Runs every (epsilon, p, seed) cell of `grid` on top of `base`. A failing
// cell yields an error row; the sweep continues. When `out_dir` is nonempty,
// writes cell_<i>.json per completed cell and summary.csv.
std::vector<SweepRow> Sweep(const RunConfig& base, const SweepGrid& grid,
                            const std::string& out_dir, size_t jobs = 1);

std::string SweepSummaryCsv(const std::vector<SweepRow>& rows);

}  // namespace mccal

#endif  // MCCAL_EXPERIMENT_H_
