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

// Command-line driver: levels, scenario, run, sweep and eval.

#include <charconv>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mccal/errors.h"
#include "mccal/evaluator.h"
#include "mccal/experiment.h"
#include "mccal/io.h"
#include "mccal/simplex.h"
#include "mccal/world.h"

namespace {

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<mccal::NormExponent> ParseNorms(const std::string& text) {
  std::vector<mccal::NormExponent> out;
  for (const auto& s : SplitList(text)) out.push_back(mccal::NormExponent::Parse(s));
  return out;
}

// "1,2,3" or "1-100".
uint64_t ParseSeed(const std::string& text) {
  uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw mccal::InvalidArgument("bad seed: " + text);
  }
  return v;
}

std::vector<uint64_t> ParseSeeds(const std::string& text) {
  std::vector<uint64_t> out;
  for (const auto& s : SplitList(text)) {
    if (auto dash = s.find('-'); dash != std::string::npos && dash > 0) {
      const uint64_t lo = ParseSeed(s.substr(0, dash));
      const uint64_t hi = ParseSeed(s.substr(dash + 1));
      if (hi < lo) throw mccal::InvalidArgument("empty seed range: " + s);
      for (uint64_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(ParseSeed(s));
    }
  }
  return out;
}

struct RunFlags {
  std::string config_path;
  std::string scenario;
  size_t k = 0;
  size_t n_features = 0;
  std::string p;
  double epsilon = -1.0;
  double delta = -1.0;
  int64_t seed = -1;
  std::string sample_mode;
  int64_t a1_samples = 0;
  int64_t pool_samples = 0;
  std::string report;
  std::string trace;
  std::string h_out;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run config");
  cmd->add_option("--scenario", f.scenario,
                  "perfect | overconfident | shifted | random-miscalibrated");
  cmd->add_option("--k", f.k, "number of classes");
  cmd->add_option("--n-features", f.n_features, "number of feature points");
  cmd->add_option("--p", f.p, "norm exponent (inf, 2, 3/2, ...)");
  cmd->add_option("--epsilon", f.epsilon, "target calibration error");
  cmd->add_option("--delta", f.delta, "failure probability");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--sample-mode", f.sample_mode, "auto | manual");
  cmd->add_option("--a1-samples", f.a1_samples, "manual mode: bin-mass samples");
  cmd->add_option("--pool-samples", f.pool_samples, "manual mode: samples per pool");
}

mccal::RunConfig BuildConfig(const RunFlags& f) {
  mccal::RunConfig c;
  if (!f.config_path.empty()) {
    c = mccal::RunConfig::FromJson(mccal::ReadJsonFile(f.config_path));
  }
  if (!f.scenario.empty()) c.scenario = f.scenario;
  if (f.k) c.k = f.k;
  if (f.n_features) c.n_features = f.n_features;
  if (!f.p.empty()) c.p = mccal::NormExponent::Parse(f.p);
  if (f.epsilon >= 0) c.epsilon = f.epsilon;
  if (f.delta >= 0) c.delta = f.delta;
  if (f.seed >= 0) c.seed = static_cast<uint64_t>(f.seed);
  if (f.sample_mode == "manual") {
    c.plan.manual = true;
  } else if (f.sample_mode == "auto") {
    c.plan.manual = false;
  } else if (!f.sample_mode.empty()) {
    throw mccal::InvalidArgument("unknown sample mode " + f.sample_mode);
  }
  if (f.a1_samples) c.plan.a1_samples = f.a1_samples;
  if (f.pool_samples) c.plan.pool_samples = f.pool_samples;
  if (!f.report.empty()) c.report_path = f.report;
  if (!f.trace.empty()) c.trace_path = f.trace;
  if (!f.h_out.empty()) c.h_path = f.h_out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiclass calibration with lp error guarantees"};
  app.require_subcommand(1);

  int lambda = 0;
  int k = 0;
  bool count_only = false;
  auto* levels = app.add_subcommand("levels", "enumerate the level sets V_lambda^k");
  levels->add_option("--lambda", lambda)->required();
  levels->add_option("--k", k)->required();
  levels->add_flag("--count-only", count_only);

  std::string scenario_name;
  size_t scenario_k = 3;
  size_t scenario_features = 40;
  uint64_t scenario_seed = 0;
  std::string scenario_out;
  auto* scenario = app.add_subcommand("scenario", "write a synthetic world");
  scenario->add_option("--name", scenario_name)->required();
  scenario->add_option("--k", scenario_k);
  scenario->add_option("--n-features", scenario_features);
  scenario->add_option("--seed", scenario_seed);
  scenario->add_option("--out", scenario_out)->required();

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "calibrate one scenario and evaluate it");
  AddRunFlags(run, run_flags);
  run->add_option("--report", run_flags.report, "report JSON path");
  run->add_option("--trace", run_flags.trace, "trace CSV path");
  run->add_option("--h-out", run_flags.h_out, "calibrated predictor JSON path");

  RunFlags sweep_flags;
  std::string sweep_eps;
  std::string sweep_ps;
  std::string sweep_seeds;
  std::string sweep_out;
  size_t sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run a grid of configurations");
  AddRunFlags(sweep, sweep_flags);
  sweep->add_option("--epsilons", sweep_eps, "comma-separated epsilons")->required();
  sweep->add_option("--ps", sweep_ps, "comma-separated norm exponents")->required();
  sweep->add_option("--seeds", sweep_seeds, "seed list or range, e.g. 1-100")->required();
  sweep->add_option("--out-dir", sweep_out, "directory for reports and summary.csv")
      ->required();
  sweep->add_option("--jobs", sweep_jobs, "parallel cells");

  std::string world_path;
  std::string pred_path;
  int eval_lambda = 0;
  std::string eval_ps = "inf,2,1";
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "exact calibration report of a predictor");
  eval->add_option("--world", world_path, "world document")->required();
  eval->add_option("--pred", pred_path, "predictor document (default: the world's)");
  eval->add_option("--lambda", eval_lambda, "grid resolution")->required();
  eval->add_option("--p", eval_ps, "comma-separated norm exponents");
  eval->add_option("--out", eval_out, "write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*levels) {
      if (count_only) {
        std::cout << mccal::EnumerateLevels(lambda, k).size() << "\n";
      } else {
        for (const auto& v : mccal::EnumerateLevels(lambda, k)) {
          std::cout << v.ToString() << "\n";
        }
      }
      return 0;
    }
    if (*scenario) {
      const auto s = mccal::MakeScenario(scenario_name, scenario_k,
                                         scenario_features, scenario_seed);
      mccal::WriteJsonFile(scenario_out, mccal::WorldToJson(s.world, &s.predictor));
      return 0;
    }
    if (*run) {
      const mccal::RunConfig config = BuildConfig(run_flags);
      const int code = mccal::Run(config);
      if (code != 0) std::cerr << "run failed: see report status\n";
      return code;
    }
    if (*sweep) {
      mccal::RunConfig base = BuildConfig(sweep_flags);
      mccal::SweepGrid grid;
      for (const auto& s : SplitList(sweep_eps)) grid.epsilons.push_back(std::stod(s));
      grid.ps = ParseNorms(sweep_ps);
      grid.seeds = ParseSeeds(sweep_seeds);
      const auto rows = mccal::Sweep(base, grid, sweep_out, sweep_jobs);
      size_t passed = 0;
      for (const auto& r : rows) passed += r.passed();
      std::cout << passed << "/" << rows.size() << " cells passed\n";
      return 0;
    }
    if (*eval) {
      const auto world_doc = mccal::ReadJsonFile(world_path);
      const mccal::World world = mccal::WorldFromJson(world_doc);
      const mccal::Predictor h = mccal::PredictorFromJson(
          pred_path.empty() ? world_doc : mccal::ReadJsonFile(pred_path));
      const auto ps = ParseNorms(eval_ps);
      const auto report = mccal::ExactReport(world, h, eval_lambda, ps);
      const auto doc = mccal::ReportToJson(report);
      if (eval_out.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        mccal::WriteJsonFile(eval_out, doc);
      }
      return 0;
    }
  } catch (const mccal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
