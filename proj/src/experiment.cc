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

#include "mccal/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <sstream>
#include <thread>

#include "mccal/errors.h"
#include "mccal/io.h"
#include "mccal/world.h"

namespace mccal {
namespace {

// Shortest text that reads back as the same double.
std::string FormatDouble(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string JoinBins(const BinSet& bins) {
  std::string out;
  for (const LevelSet& v : bins) {
    if (!out.empty()) out += ';';
    out += v.ToString();
  }
  return out;
}

std::string JoinCoords(const ProbVector& u) {
  std::string out;
  for (size_t i = 0; i < u.size(); ++i) {
    if (i) out += ';';
    out += FormatDouble(u[i]);
  }
  return out;
}

std::string_view MovedName(MovedSide side) {
  switch (side) {
    case MovedSide::kNone:
      return "none";
    case MovedSide::kSelected:
      return "selected";
    case MovedSide::kPartner:
      return "partner";
  }
  return "none";
}

std::string_view StatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kEstimateFailure:
      return "estimate_failure";
    case RunStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "ok";
}

nlohmann::json ParamsToJson(const CalibParams& p) {
  nlohmann::json doc = {{"p", p.p.ToString()},
          {"epsilon", p.epsilon},
          {"delta", p.delta},
          {"beta", p.beta},
          {"lambda", p.lambda},
          {"error_threshold", p.error_threshold},
          {"bin_threshold", p.bin_threshold},
          {"a1_accuracy", p.a1_accuracy},
          {"a1_delta", p.a1_delta},
          {"t_max", p.t_max}};
  // Unknown until bins are selected, and meaningless without pools.
  if (p.size_classes == 0) {
    doc["size_classes"] = nullptr;
    doc["pool_accuracy"] = nullptr;
    doc["pool_delta"] = nullptr;
  } else {
    doc["size_classes"] = p.size_classes;
    doc["pool_accuracy"] = p.pool_accuracy;
    doc["pool_delta"] = p.pool_delta;
  }
  return doc;
}

nlohmann::json NormsJson(const ErrorReport& r) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [p, v] : r.norms) out[p.ToString()] = v;
  return out;
}

}  // namespace

RunConfig RunConfig::FromJson(const nlohmann::json& doc) {
  RunConfig c;
  try {
    if (doc.contains("scenario")) {
      const auto& s = doc.at("scenario");
      if (s.is_string()) {
        c.scenario = s.get<std::string>();
      } else {
        c.scenario = s.value("name", c.scenario);
        c.k = s.value("k", c.k);
        c.n_features = s.value("n_features", c.n_features);
      }
    }
    if (doc.contains("p")) {
      const auto& p = doc.at("p");
      c.p = p.is_string() ? NormExponent::Parse(p.get<std::string>())
                          : NormExponent::Parse(p.dump());
    }
    c.epsilon = doc.value("epsilon", c.epsilon);
    c.delta = doc.value("delta", c.delta);
    c.seed = doc.value("seed", c.seed);
    c.check_invariants = doc.value("check_invariants", c.check_invariants);
    if (doc.contains("sample_mode")) {
      const auto& mode = doc.at("sample_mode");
      if (mode.is_string()) {
        if (mode.get<std::string>() != "auto") {
          throw InvalidArgument("sample_mode must be \"auto\" or {\"manual\": ...}");
        }
      } else {
        const auto& manual = mode.at("manual");
        c.plan.manual = true;
        c.plan.a1_samples = manual.at("a1_samples").get<int64_t>();
        c.plan.pool_samples = manual.at("pool_samples").get<int64_t>();
      }
    }
    c.report_path = doc.value("report", c.report_path);
    c.trace_path = doc.value("trace", c.trace_path);
    c.h_path = doc.value("h_out", c.h_path);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  return c;
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json doc;
  doc["scenario"] = {{"name", scenario}, {"k", k}, {"n_features", n_features}};
  doc["p"] = p.ToString();
  doc["epsilon"] = epsilon;
  doc["delta"] = delta;
  doc["seed"] = seed;
  if (plan.manual) {
    doc["sample_mode"] = {{"manual",
                           {{"a1_samples", plan.a1_samples},
                            {"pool_samples", plan.pool_samples}}}};
  } else {
    doc["sample_mode"] = "auto";
  }
  return doc;
}

void RunConfig::Validate() const {
  ParseScenarioKind(scenario);
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n_features < 1) throw InvalidArgument("n_features must be >= 1");
  DeriveParams(p, epsilon, delta);
  if (plan.manual && (plan.a1_samples < 1 || plan.pool_samples < 1)) {
    throw InvalidArgument("manual sample sizes must be positive");
  }
}

std::string TraceToCsv(const RunTrace& trace) {
  std::ostringstream out;
  out << "t,group_id,bins,j,est_error,z_j,pred,g_partner,moved,result_group,"
         "m_merges\n";
  for (const IterationRecord& r : trace.iterations) {
    out << r.t << ',' << r.group_id << ",\"" << JoinBins(r.bins) << "\"," << r.j
        << ',' << FormatDouble(r.est_error) << ',' << FormatDouble(r.z_j) << ','
        << JoinCoords(r.final_pred) << ','
        << (r.g_partner ? std::to_string(*r.g_partner) : "-") << ','
        << MovedName(r.moved) << ',' << r.result_group << ','
        << r.m_merges.size() << '\n';
  }
  return out.str();
}

RunOutcome Execute(const RunConfig& config) {
  config.Validate();
  const CalibParams params = DeriveParams(config.p, config.epsilon, config.delta);
  const Scenario scenario =
      MakeScenario(config.scenario, config.k, config.n_features, config.seed);

  RunOutcome outcome;
  nlohmann::json report;
  report["config"] = config.ToJson();
  CalibrationOptions options;
  options.seed = config.seed;
  options.plan = config.plan;
  options.check_invariants = config.check_invariants;
  try {
    outcome.result = Calibrate(scenario.world, scenario.predictor, params, options);
  } catch (const EstimateFailure& e) {
    outcome.status = RunStatus::kEstimateFailure;
    outcome.message = e.what();
  } catch (const IterationLimitExceeded& e) {
    outcome.status = RunStatus::kIterationLimit;
    outcome.message = e.what();
  }
  report["status"] = StatusName(outcome.status);
  if (!outcome.result) {
    report["params"] = ParamsToJson(params);
    report["message"] = outcome.message;
    outcome.report = std::move(report);
    return outcome;
  }

  const CalibrationResult& res = *outcome.result;
  const int lambda = res.params.lambda;
  report["params"] = ParamsToJson(res.params);
  report["high_bins"] = res.high_bins.size();
  nlohmann::json pools = nlohmann::json::array();
  for (const PoolSummary& p : res.trace.pools) {
    pools.push_back({{"name", p.name},
                     {"m", p.m},
                     {"alpha", p.alpha},
                     {"delta", p.delta},
                     {"noise_scale", p.noise_scale},
                     {"max_events", p.max_events},
                     {"value_dim", p.value_dim},
                     {"queries", p.queries}});
  }
  report["samples"] = {{"a1", res.trace.a1_samples}, {"pools", pools}};
  report["iterations"] = res.trace.iterations.size();

  outcome.h_table = res.h.ToPredictor();
  std::vector<NormExponent> ps = {NormExponent::Rational(1), NormExponent::Rational(2),
                                  NormExponent::Infinity()};
  if (std::find(ps.begin(), ps.end(), res.params.p) == ps.end()) {
    ps.push_back(res.params.p);
  }
  const ErrorReport f_report =
      ExactReport(scenario.world, scenario.predictor, lambda, ps);
  const ErrorReport h_report =
      ExactReport(scenario.world, *outcome.h_table, lambda, ps, &scenario.predictor);
  report["err_p"] = {{"f", NormsJson(f_report)}, {"h", NormsJson(h_report)}};
  report["max_bin_error"] = {{"f", f_report.MaxError()}, {"h", h_report.MaxError()}};

  outcome.checks =
      CheckBounds(h_report, res.params.p, res.params.epsilon, res.params.beta);
  outcome.events = CheckEstimationEvents(scenario.world, scenario.predictor, res);
  for (const auto& [v, count] : res.moves) {
    outcome.max_moves = std::max(outcome.max_moves, count);
  }
  const BoundChecks& c = *outcome.checks;
  report["squared_error"] = {{"f", *h_report.sq_error_f},
                             {"h", h_report.sq_error_h},
                             {"increase", c.sq_error_increase},
                             {"budget", c.sq_error_budget}};
  report["checks"] = {
      {"per_bin_error_le_beta", c.per_bin},
      {"aggregate_le_bound", c.aggregate_ok},
      {"err_p_le_epsilon", c.within_epsilon},
      {"squared_error_within_budget", c.squared_error},
      {"iterations_le_t_max",
       static_cast<int64_t>(res.trace.iterations.size()) <= res.params.t_max},
      {"moves_le_bound", outcome.max_moves <= MoveBound(res.params.beta)},
      {"max_constituents_le_size_classes",
       res.max_constituents_seen <= std::max<size_t>(res.params.size_classes, 1)},
      {"event_a1", outcome.events->a1},
      {"event_a2", outcome.events->a2},
      {"event_a3", outcome.events->a3}};
  report["event_deviation"] = {{"a1", outcome.events->a1_max_deviation},
                               {"a2", outcome.events->a2_max_deviation},
                               {"a3", outcome.events->a3_max_deviation}};
  report["max_moves"] = outcome.max_moves;
  outcome.report = std::move(report);
  outcome.trace_csv = TraceToCsv(res.trace);
  return outcome;
}

int Run(const RunConfig& config) {
  RunOutcome outcome = Execute(config);
  if (!config.report_path.empty()) WriteJsonFile(config.report_path, outcome.report);
  if (!config.trace_path.empty()) WriteTextFile(config.trace_path, outcome.trace_csv);
  if (!config.h_path.empty() && outcome.h_table) {
    WriteJsonFile(config.h_path, PredictorToJson(*outcome.h_table));
  }
  return outcome.status == RunStatus::kOk ? 0 : 2;
}

std::vector<SweepRow> Sweep(const RunConfig& base, const SweepGrid& grid,
                            const std::string& out_dir, size_t jobs) {
  if (grid.epsilons.empty() || grid.ps.empty() || grid.seeds.empty()) {
    throw InvalidArgument("sweep grid is empty");
  }
  std::vector<RunConfig> cells;
  for (double eps : grid.epsilons) {
    for (const NormExponent& p : grid.ps) {
      for (uint64_t seed : grid.seeds) {
        RunConfig c = base;
        c.epsilon = eps;
        c.p = p;
        c.seed = seed;
        c.report_path.clear();
        c.trace_path.clear();
        c.h_path.clear();
        cells.push_back(std::move(c));
      }
    }
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::vector<SweepRow> rows(cells.size());
  auto run_cell = [&](size_t i) {
    const RunConfig& c = cells[i];
    SweepRow& row = rows[i];
    row.cell = i;
    row.epsilon = c.epsilon;
    row.p = c.p.ToString();
    row.seed = c.seed;
    try {
      RunOutcome out = Execute(c);
      row.status = StatusName(out.status);
      row.message = out.message;
      if (out.result) {
        row.iterations = static_cast<int64_t>(out.result->trace.iterations.size());
        row.err_inf_h = out.report["err_p"]["h"]["inf"].get<double>();
        row.err_p_h = out.report["err_p"]["h"][c.p.ToString()].get<double>();
        row.sq_increase = out.checks->sq_error_increase;
        row.per_bin = out.checks->per_bin;
        row.aggregate = out.checks->aggregate_ok;
        row.squared_error = out.checks->squared_error;
        row.events = out.events->all();
      }
      if (!out_dir.empty()) {
        WriteJsonFile(out_dir + "/cell_" + std::to_string(i) + ".json", out.report);
      }
    } catch (const Error& e) {
      row.status = "error";
      row.message = e.what();
    }
  };

  jobs = std::max<size_t>(1, std::min(jobs, cells.size()));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) run_cell(i);
  };
  std::vector<std::thread> threads;
  for (size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();

  if (!out_dir.empty()) WriteTextFile(out_dir + "/summary.csv", SweepSummaryCsv(rows));
  return rows;
}

std::string SweepSummaryCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "cell,epsilon,p,seed,status,iterations,err_inf_h,err_p_h,sq_increase,"
         "per_bin,aggregate,squared_error,events,pass,message\n";
  for (const SweepRow& r : rows) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << r.cell << ',' << FormatDouble(r.epsilon) << ',' << r.p << ',' << r.seed
        << ',' << r.status << ',' << r.iterations << ',' << FormatDouble(r.err_inf_h)
        << ',' << FormatDouble(r.err_p_h) << ',' << FormatDouble(r.sq_increase) << ','
        << r.per_bin << ',' << r.aggregate << ',' << r.squared_error << ','
        << r.events << ',' << r.passed() << ',' << msg << '\n';
  }
  return out.str();
}

}  // namespace mccal
