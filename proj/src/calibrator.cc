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

#include "mccal/calibrator.h"

#include <chrono>
#include <cmath>
#include <utility>

#include "mccal/errors.h"

namespace mccal {
namespace {

double IntPow(double base, int64_t e) {
  double r = 1.0;
  for (int64_t i = 0; i < e; ++i) r *= base;
  return r;
}

PoolSummary Summarize(const DisjointQueryPool& pool) {
  return {pool.name(),         pool.m(),          pool.alpha(),
          pool.delta(),        pool.noise_scale(), pool.max_events(),
          pool.value_dim(),    pool.queries_issued()};
}

}  // namespace

double ComputeBeta(NormExponent p, double epsilon) {
  if (p.is_infinite()) return epsilon;
  // p = a/b, p/(p-1) = a/(a-b), 1/(p-1) = b/(a-b).
  const int64_t a = p.num();
  const int64_t b = p.den();
  const int64_t gap = a - b;
  double power;
  if (a % gap == 0) {
    power = IntPow(epsilon, a / gap);
  } else {
    power = std::pow(epsilon, static_cast<double>(a) / static_cast<double>(gap));
  }
  double scale;
  if (b % gap == 0) {
    scale = std::ldexp(1.0, static_cast<int>(-(b / gap)));
  } else {
    scale = std::exp2(-static_cast<double>(b) / static_cast<double>(gap));
  }
  return power * scale;
}

int LambdaFor(double beta) {
  const double inv = 1.0 / beta;
  const double nearest = std::round(inv);
  if (std::abs(inv - nearest) <= 1e-9 * nearest) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(inv));
}

int64_t IterationBound(double beta, int lambda) {
  return static_cast<int64_t>(
      std::ceil((9.0 + 36.0 / lambda * std::log2(36.0 / beta)) /
                (beta * beta)));
}

double MoveBound(double beta) { return std::log2(36.0 / beta); }

double SquaredErrorBudget(double beta, int lambda) {
  return 4.0 / lambda * (1.0 + std::log2(36.0 / beta));
}

CalibParams DeriveParams(NormExponent p, double epsilon, double delta) {
  if (!p.is_infinite() && p.num() <= p.den()) {
    throw InvalidArgument("p must exceed 1, got " + p.ToString());
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("epsilon must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  CalibParams params;
  params.p = p;
  params.epsilon = epsilon;
  params.delta = delta;
  params.beta = ComputeBeta(p, epsilon);
  if (!(params.beta > 0.0 && params.beta < 1.0)) {
    throw InvalidArgument("derived beta outside (0, 1)");
  }
  params.lambda = LambdaFor(params.beta);
  params.error_threshold = params.beta / 2.0;
  params.bin_threshold = params.beta / 6.0;
  params.a1_accuracy = params.beta / 12.0;
  params.a1_delta = delta / 3.0;
  params.t_max = IterationBound(params.beta, params.lambda);
  return params;
}

void FinalizeParams(CalibParams& params, size_t num_high_bins) {
  params.num_high_bins = num_high_bins;
  params.size_classes = NumSizeClasses(num_high_bins);
  if (params.size_classes == 0) {
    params.pool_accuracy = 0.0;
    params.pool_delta = 0.0;
    return;
  }
  params.pool_accuracy =
      params.beta / (36.0 * static_cast<double>(params.size_classes));
  params.pool_delta =
      params.delta / (3.0 * static_cast<double>(params.size_classes));
}

BinSet SelectBins(const BinMassTable& masses, const CalibParams& params) {
  BinSet out;
  for (const auto& [v, mu] : masses.estimates()) {
    if (mu >= params.bin_threshold) out.insert(v);
  }
  return out;
}

CalibratedPredictor::CalibratedPredictor(Predictor base, int lambda,
                                         std::map<LevelSet, ProbVector> routing)
    : base_(std::move(base)), lambda_(lambda), routing_(std::move(routing)) {}

ProbVector CalibratedPredictor::ApplyToLevel(const LevelSet& v) const {
  auto it = routing_.find(v);
  return it == routing_.end() ? Canonical(v) : it->second;
}

ProbVector CalibratedPredictor::Apply(size_t x) const {
  return ApplyToLevel(RoundDown(base_(x), lambda_));
}

Predictor CalibratedPredictor::ToPredictor() const {
  std::vector<ProbVector> table;
  table.reserve(base_.size());
  for (size_t x = 0; x < base_.size(); ++x) table.push_back(Apply(x));
  return Predictor(std::move(table));
}

CalibrationResult Calibrate(const World& world, const Predictor& f,
                            const CalibParams& base_params,
                            const CalibrationOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (f.size() != world.n_features() || f.k() != world.k()) {
    throw InvalidArgument("predictor does not match the world");
  }
  CalibParams params = base_params;
  const int lambda = params.lambda;
  const size_t k = world.k();

  // Bin masses and the high-probability bins.
  int64_t a1_samples = options.plan.manual
                           ? options.plan.a1_samples
                           : BinMassSampleSize(params.a1_accuracy,
                                               params.a1_delta,
                                               CountLevels(lambda, static_cast<int>(k)));
  if (a1_samples < 1) throw InvalidArgument("a1 sample count must be positive");
  RngStream a1_stream(options.seed, "data/a1");
  BinMassTable masses =
      EstimateBinMasses(DrawCounts(world, a1_stream, a1_samples), f, lambda);
  BinSet high = SelectBins(masses, params);
  FinalizeParams(params, high.size());

  RunTrace trace;
  trace.a1_samples = a1_samples;
  if (high.empty()) {
    trace.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return {CalibratedPredictor(f, lambda, {}), std::move(trace), params,
            std::move(masses), std::move(high), {}, {}, 0, {}};
  }

  std::vector<PoolPair> pools;
  pools.reserve(params.size_classes);
  for (size_t i = 0; i < params.size_classes; ++i) {
    const std::string suffix = std::to_string(i);
    auto make = [&](const std::string& name, PoolKind kind) {
      if (options.plan.manual) {
        return DisjointQueryPool::WithSampleSize(
            world, options.seed, name, kind, high.size(), params.pool_accuracy,
            params.pool_delta, options.plan.pool_samples);
      }
      return DisjointQueryPool::Create(world, options.seed, name, kind,
                                       high.size(), params.pool_accuracy,
                                       params.pool_delta);
    };
    pools.push_back({make("P/" + suffix, PoolKind::kProbability),
                     make("E/" + suffix, PoolKind::kLabel)});
  }

  MStructure m(high, std::move(pools), f, lambda);
  GStructure g(high, m, lambda);
  std::map<LevelSet, int> moves;
  for (const LevelSet& v : high) moves[v] = 0;
  size_t max_constituents = 1;
  if (options.check_invariants) {
    m.CheckInvariants();
    g.CheckInvariants(m);
  }

  for (int64_t t = 0;; ++t) {
    // Largest cached error; ties toward smaller group id, then class.
    std::optional<GroupId> selected;
    size_t j_sel = 0;
    double worst = params.error_threshold;
    for (const auto& [id, group] : g.groups()) {
      for (size_t j = 0; j < k; ++j) {
        if (group.err[j] > worst) {
          worst = group.err[j];
          selected = id;
          j_sel = j;
        }
      }
    }
    if (!selected) break;
    if (t >= params.t_max) {
      throw IterationLimitExceeded("no convergence within t_max = " +
                                   std::to_string(params.t_max) +
                                   " iterations");
    }

    IterationRecord rec;
    rec.t = t;
    rec.group_id = *selected;
    rec.bins = g.group(*selected).bins;
    rec.j = j_sel;
    rec.est_error = worst;

    const Aggregate agg = m.Sum(rec.bins);
    max_constituents = std::max(max_constituents, agg.constituents);
    if (!(agg.p_hat > 0.0)) {
      throw EstimateFailure("aggregated mass of group " +
                            std::to_string(*selected) + " is not positive");
    }
    std::vector<double> z = g.group(*selected).pred.coords();
    z[j_sel] = std::min(agg.e_hat[j_sel] / agg.p_hat, 1.0);
    rec.z_j = z[j_sel];
    rec.projected = ProjectSimplex(z);
    g.SetPrediction(*selected, rec.projected);

    GroupId current = *selected;
    const LevelSet level = RoundDown(rec.projected, lambda);
    if (auto partner = g.FindCollision(level, current)) {
      const Aggregate other = m.Sum(g.group(*partner).bins);
      max_constituents = std::max(max_constituents, other.constituents);
      rec.g_partner = partner;
      const GroupId winner =
          MergeWinner(current, agg.p_hat, *partner, other.p_hat);
      const GroupId loser = winner == current ? *partner : current;
      rec.moved = loser == current ? MovedSide::kSelected : MovedSide::kPartner;
      for (const LevelSet& v : g.group(loser).bins) ++moves[v];
      ProbVector winner_pred = g.group(winner).pred;
      current = g.Merge(current, *partner, std::move(winner_pred));
    }
    rec.result_group = current;

    rec.m_merges = m.MergePass(g.group(current).bins, f, lambda);
    const Aggregate merged = m.Sum(g.group(current).bins);
    max_constituents = std::max(max_constituents, merged.constituents);
    rec.final_pred = g.group(current).pred;
    rec.new_errors = EstimatedErrors(merged, rec.final_pred);
    g.SetErrors(current, rec.new_errors);

    if (options.check_invariants) {
      m.CheckInvariants();
      g.CheckInvariants(m);
    }
    trace.iterations.push_back(std::move(rec));
  }

  std::map<LevelSet, ProbVector> routing;
  for (const auto& [id, group] : g.groups()) {
    for (const LevelSet& v : group.bins) routing.emplace(v, group.pred);
  }
  for (const PoolPair& pair : m.pools()) {
    trace.pools.push_back(Summarize(pair.probability));
    trace.pools.push_back(Summarize(pair.label));
  }
  std::vector<MGroupRecord> history;
  for (const auto& [id, rec] : m.history()) history.push_back(rec);
  std::vector<GGroup> final_groups;
  for (const auto& [id, group] : g.groups()) final_groups.push_back(group);
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return {CalibratedPredictor(f, lambda, std::move(routing)),
          std::move(trace),
          params,
          std::move(masses),
          std::move(high),
          std::move(history),
          std::move(moves),
          max_constituents,
          std::move(final_groups)};
}

}  // namespace mccal
