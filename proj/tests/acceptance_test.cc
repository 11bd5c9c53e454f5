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


// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mccal/calibrator.h"
#include "mccal/errors.h"
#include "mccal/estimation.h"
#include "mccal/experiment.h"
#include "mccal/io.h"
#include "mccal/simplex.h"
#include "mccal/world.h"
#include "oracles.h"

namespace {

using namespace mccal;

constexpr int kSeeds = 100;
constexpr int kMinPassing = 85;
constexpr double kMaxEventFailureRate = 0.15;

struct Verdict {
  bool pass;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::vector<double> RandomSimplex(std::mt19937_64& gen, size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> u(k);
  double s = 0.0;
  for (double& x : u) s += (x = e(gen));
  for (double& x : u) x /= s;
  return u;
}

double SquaredDistance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

Verdict Geometry() {
  const auto start = std::chrono::steady_clock::now();
  int pairs = 0;
  for (int lambda = 1; lambda <= 11; ++lambda) {
    for (int k = 1; lambda + k <= 12; ++k) {
      const std::vector<LevelSet> levels = EnumerateLevels(lambda, k);
      const auto brute = oracle::BruteForceLevels(lambda, k);
      if (levels.size() != brute.size() ||
          levels.size() > Binomial(lambda + k, k)) {
        return {false, Format("lambda=%d k=%d: %zu levels vs %zu witnessed", lambda, k,
                              levels.size(), brute.size())};
      }
      for (size_t i = 0; i < levels.size(); ++i) {
        if (levels[i].numerators() != brute[i]) {
          return {false, Format("lambda=%d k=%d: mismatch at %zu", lambda, k, i)};
        }
      }
      ++pairs;
    }
  }
  const double secs = Seconds(start);
  return {secs < 10.0, Format("%d (lambda,k) pairs, %.2fs (limit 10s)", pairs, secs)};
}

Verdict Projection() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  double worst_grid = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const size_t k = 1 + trial % 20;
    std::vector<double> z(k);
    for (double& x : z) x = coord(gen);
    const ProbVector p = ProjectSimplex(z);
    if (!IsProbVector(p.coords(), 1e-9)) return {false, "projection left the simplex"};
    const double d = SquaredDistance(p.coords(), z);
    for (int i = 0; i < 1000; ++i) {
      if (SquaredDistance(RandomSimplex(gen, k), z) < d - 1e-12) {
        return {false, Format("random point beat the projection (k=%zu)", k)};
      }
    }
    if ((k == 2 || k == 3) && trial % 25 < 2) {
      const std::vector<double> grid = oracle::GridProjection(z, k == 2 ? 10000 : 1000);
      for (size_t i = 0; i < k; ++i) {
        worst_grid = std::max(worst_grid, std::fabs(grid[i] - p[i]));
      }
    }
  }
  const double secs = Seconds(start);
  return {secs < 30.0 && worst_grid <= 1e-3,
          Format("grid gap %.2e (limit 1e-3), %.2fs (limit 30s)", worst_grid, secs)};
}

struct RunRecord {
  bool ok = false;         // completed without estimate failure or limit breach
  bool violation = false;  // structural invariant broken
  std::string error;
  bool events = false;
  bool a1 = false, a2 = false, a3 = false;
  bool per_bin = false, aggregate = false, within_epsilon = false, squared = false;
  bool iterations_ok = false, moves_ok = false, constituents_ok = false;
  std::vector<nlohmann::json> pools;
};

struct Suite {
  std::string name;
  NormExponent p;
  double epsilon;
  std::vector<RunRecord> runs;

  int Count(const std::function<bool(const RunRecord&)>& pred) const {
    int n = 0;
    for (const RunRecord& r : runs) n += pred(r) ? 1 : 0;
    return n;
  }
};

Suite RunSuite(const std::string& name, NormExponent p, double epsilon) {
  Suite suite{name, p, epsilon, {}};
  for (int seed = 0; seed < kSeeds; ++seed) {
    RunConfig config;
    config.scenario = "random-miscalibrated";
    config.k = 3;
    config.n_features = 40;
    config.p = p;
    config.epsilon = epsilon;
    config.delta = 0.1;
    config.seed = static_cast<uint64_t>(seed);
    config.check_invariants = true;
    RunRecord rec;
    try {
      const RunOutcome out = Execute(config);
      rec.ok = out.status == RunStatus::kOk;
      if (rec.ok) {
        const nlohmann::json& c = out.report.at("checks");
        rec.a1 = out.events->a1;
        rec.a2 = out.events->a2;
        rec.a3 = out.events->a3;
        rec.events = out.events->all();
        rec.per_bin = out.checks->per_bin;
        rec.aggregate = out.checks->aggregate_ok;
        rec.within_epsilon = out.checks->within_epsilon;
        rec.squared = out.checks->squared_error;
        rec.iterations_ok = c.at("iterations_le_t_max").get<bool>();
        rec.moves_ok = c.at("moves_le_bound").get<bool>();
        rec.constituents_ok = c.at("max_constituents_le_size_classes").get<bool>();
        for (const auto& pool : out.report.at("samples").at("pools")) {
          rec.pools.push_back(pool);
        }
      } else {
        rec.error = out.message;
      }
    } catch (const InvariantViolation& e) {
      rec.violation = true;
      rec.error = e.what();
    } catch (const DisjointnessViolation& e) {
      rec.violation = true;
      rec.error = e.what();
    }
    suite.runs.push_back(std::move(rec));
  }
  return suite;
}

// At least kMinPassing runs satisfy `check`, and no run whose estimation
// events held violates it.
Verdict BoundRule(const std::vector<const Suite*>& suites,
                  const std::function<bool(const RunRecord&)>& check) {
  bool pass = true;
  std::string detail;
  for (const Suite* s : suites) {
    const int passing = s->Count([&](const RunRecord& r) { return r.ok && check(r); });
    const int conditioned =
        s->Count([&](const RunRecord& r) { return r.ok && r.events && !check(r); });
    pass = pass && passing >= kMinPassing && conditioned == 0;
    if (!detail.empty()) detail += "; ";
    detail += Format("%s %d/%d (min %d), %d with events held but failing", s->name.c_str(),
                     passing, kSeeds, kMinPassing, conditioned);
  }
  return {pass, detail};
}

Verdict Termination(const std::vector<const Suite*>& suites) {
  bool pass = true;
  std::string detail;
  for (const Suite* s : suites) {
    const int iter_bad =
        s->Count([](const RunRecord& r) { return r.ok && !r.iterations_ok; });
    const int limit_hits = s->Count([](const RunRecord& r) { return !r.ok && !r.violation; });
    const int move_bad =
        s->Count([](const RunRecord& r) { return r.ok && r.events && !r.moves_ok; });
    pass = pass && iter_bad == 0 && move_bad == 0;
    if (!detail.empty()) detail += "; ";
    detail += Format("%s: %d over t_max, %d move-bound breaches, %d failed runs",
                     s->name.c_str(), iter_bad, move_bad, limit_hits);
  }
  return {pass, detail};
}

Verdict Invariants(const std::vector<const Suite*>& suites) {
  int violations = 0;
  int total = 0;
  for (const Suite* s : suites) {
    violations += s->Count([](const RunRecord& r) {
      return r.violation || (r.ok && !r.constituents_ok);
    });
    total += static_cast<int>(s->runs.size());
  }
  return {violations == 0, Format("%d violations over %d runs", violations, total)};
}

Verdict Events(const std::vector<const Suite*>& suites) {
  bool pass = true;
  std::string detail;
  for (const Suite* s : suites) {
    const int n = static_cast<int>(s->runs.size());
    const int f1 = s->Count([](const RunRecord& r) { return !r.ok || !r.a1; });
    const int f2 = s->Count([](const RunRecord& r) { return !r.ok || !r.a2; });
    const int f3 = s->Count([](const RunRecord& r) { return !r.ok || !r.a3; });
    const int cap = static_cast<int>(std::floor(kMaxEventFailureRate * n));
    pass = pass && f1 <= cap && f2 <= cap && f3 <= cap;
    if (!detail.empty()) detail += "; ";
    detail += Format("%s A1/A2/A3 failures %d/%d/%d (max %d)", s->name.c_str(), f1, f2,
                     f3, cap);
  }
  return {pass, detail};
}

Verdict Mechanism(const std::vector<const Suite*>& suites) {
  int pools = 0;
  int bad = 0;
  for (const Suite* s : suites) {
    for (const RunRecord& r : s->runs) {
      for (const nlohmann::json& pool : r.pools) {
        ++pools;
        const int64_t m = pool.at("m").get<int64_t>();
        const double alpha = pool.at("alpha").get<double>();
        const double delta = pool.at("delta").get<double>();
        const double n = pool.at("max_events").get<double>();
        const double dim = pool.at("value_dim").get<double>();
        const auto expected_m =
            static_cast<int64_t>(std::ceil(32.0 * std::log(4.0 * n * dim / delta) /
                                           (alpha * alpha)));
        const double expected_scale = 8.0 / (static_cast<double>(m) * alpha);
        if (m != expected_m || pool.at("noise_scale").get<double>() != expected_scale) ++bad;
      }
    }
  }
  const Scenario s = MakeScenario("random-miscalibrated", 3, 40, 0);
  DisjointQueryPool pool = DisjointQueryPool::Create(s.world, 0, "P/0",
                                                     PoolKind::kProbability, 4, 0.01, 0.1);
  const LevelSet a({1, 1, 1}, 4);
  const LevelSet b({2, 1, 1}, 4);
  pool.Query({a}, s.predictor, 4);
  bool rejected = false;
  try {
    pool.Query({a, b}, s.predictor, 4);
  } catch (const DisjointnessViolation&) {
    rejected = true;
  }
  return {pools > 0 && bad == 0 && rejected,
          Format("%d pools checked, %d mismatches, overlap %s", pools, bad,
                 rejected ? "rejected" : "accepted")};
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Verdict Determinism() {
  const std::string dir = MCCAL_GOLDEN_DIR;
  int matched = 0;
  bool repeat_ok = true;
  for (const char* name : {"miscalibrated_p2", "overconfident_inf", "shifted_manual"}) {
    const RunConfig config =
        RunConfig::FromJson(ReadJsonFile(dir + "/" + name + ".config.json"));
    const RunOutcome a = Execute(config);
    const RunOutcome b = Execute(config);
    const std::string report = a.report.dump(2) + "\n";
    repeat_ok = repeat_ok && report == b.report.dump(2) + "\n" && a.trace_csv == b.trace_csv;
    if (report == Slurp(dir + "/" + name + ".report.json") &&
        a.trace_csv == Slurp(dir + "/" + name + ".trace.csv")) {
      ++matched;
    }
  }
  return {repeat_ok && matched == 3,
          Format("repeat runs %s, %d/3 golden files match", repeat_ok ? "identical" : "differ",
                 matched)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const Verdict& v) {
    std::printf("%s  %2d  %s: %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  };

  report(1, "geometry oracle equivalence", Geometry());
  report(2, "projection correctness", Projection());

  const Suite inf = RunSuite("p=inf,eps=0.25", NormExponent::Infinity(), 0.25);
  const Suite two = RunSuite("p=2,eps=0.3", NormExponent::Rational(2), 0.3);
  const std::vector<const Suite*> both = {&inf, &two};

  report(3, "per-bin error <= beta", BoundRule({&inf}, [](const RunRecord& r) {
           return r.per_bin;
         }));
  report(4, "aggregate lp bound and Err_p <= eps", BoundRule(both, [](const RunRecord& r) {
           return r.aggregate && r.within_epsilon;
         }));
  report(5, "squared-error budget", BoundRule(both, [](const RunRecord& r) {
           return r.squared;
         }));
  report(6, "termination and move bounds", Termination(both));
  report(7, "structure invariants", Invariants(both));
  report(8, "estimation events", Events(both));
  report(9, "mechanism structure", Mechanism(both));
  report(10, "determinism", Determinism());

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
