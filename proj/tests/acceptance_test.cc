// Copyright 2026 the bprb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// followed by the measurements behind it, and exits non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bprb/gcn.h"
#include "bprb/harness.h"
#include "bprb/instance_gen.h"
#include "bprb/instance_io.h"
#include "bprb/reduction.h"
#include "bprb/search.h"
#include "oracles.h"

namespace bprb {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

const std::vector<Family> kFamilies = {Family::kVertexCover, Family::kIndependentSet,
                                       Family::kDominatingSet, Family::kAuction};

// Every instance generated during the run, for the round-trip identity check.
std::vector<MipInstance>& Generated() {
  static std::vector<MipInstance> all;
  return all;
}

MipInstance Track(MipInstance inst) {
  Generated().push_back(inst);
  return inst;
}

std::vector<MipInstance> TrackAll(std::vector<MipInstance> instances) {
  for (const MipInstance& inst : instances) Generated().push_back(inst);
  return instances;
}

// Small instances of every family with at most 20 variables.
std::vector<MipInstance> SmallFamilyInstances(int per_family, uint64_t seed) {
  std::vector<MipInstance> out;
  std::mt19937_64 rng(seed);
  for (Family family : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      FamilyScale scale;
      scale.n_nodes = 6 + static_cast<int>(rng() % 15);
      scale.affinity = 2 + static_cast<int>(rng() % 3);
      scale.n_bids = 6 + static_cast<int>(rng() % 15);
      scale.n_items = std::max(3, scale.n_bids * 2 / 3);
      out.push_back(Track(GenerateFamilyInstance(family, scale, seed + 17 * i + 1)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SoundnessCase {
  MipInstance instance;
  std::map<int, int> fixed;
};

std::vector<SoundnessCase> SoundnessCases() {
  std::vector<SoundnessCase> cases;
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> share(0.0, 0.6);
  for (int i = 0; i < 200; ++i) {
    const int n = 3 + static_cast<int>(rng() % 18);
    const int m = 1 + static_cast<int>(rng() % 15);
    MipInstance inst = Track(testing::RandomBinaryInstance(rng, n, m));
    for (int k = 0; k < 2; ++k) cases.push_back({inst, testing::RandomFixing(rng, n, share(rng))});
  }
  for (MipInstance& inst : SmallFamilyInstances(25, 99)) {
    for (int k = 0; k < 2; ++k) {
      cases.push_back({inst, testing::RandomFixing(rng, inst.num_vars(), share(rng))});
    }
  }
  return cases;
}

Outcome ReductionSoundness(const std::vector<SoundnessCase>& cases) {
  const auto start = Clock::now();
  int mismatches = 0, conflicts = 0;
  std::string first;
  for (const SoundnessCase& c : cases) {
    const std::string why = testing::CheckReductionSoundness(c.instance, c.fixed);
    if (!why.empty()) {
      if (first.empty()) first = c.instance.name() + ": " + why;
      ++mismatches;
    }
    if (std::holds_alternative<Conflict>(ReduceToFixpoint(c.instance, [&] {
          FixedSet f;
          for (const auto& [var, value] : c.fixed) f.Add(var, value, FixSource::kGreedy);
          return f;
        }()))) {
      ++conflicts;
    }
  }
  const double t = SecondsSince(start);
  Outcome out;
  out.pass = mismatches == 0 && t < 120.0;
  out.detail = Format("%zu cases (400 random, 200 family), %d conflicts, %d mismatches, %.1f s",
                      cases.size(), conflicts, mismatches, t);
  if (!first.empty()) out.detail += "; first: " + first;
  return out;
}

Outcome LocalRuleSoundness(const std::vector<SoundnessCase>& cases) {
  int mismatches = 0;
  std::string first;
  for (const SoundnessCase& c : cases) {
    const std::string why = testing::CheckLocalRules(c.instance, c.fixed);
    if (!why.empty()) {
      if (first.empty()) first = c.instance.name() + ": " + why;
      ++mismatches;
    }
  }
  Outcome out;
  out.pass = mismatches == 0;
  out.detail = Format("%zu cases, %d mismatches", cases.size(), mismatches);
  if (!first.empty()) out.detail += "; first: " + first;
  return out;
}

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(31337);
  int64_t checked = 0, failures = 0, skipped = 0, smaller = 0;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    MipInstance inst = Track(testing::RandomBinaryInstance(rng, 6, 2 + t % 4));
    std::vector<int> labels(6);
    for (int& y : labels) y = static_cast<int>(rng() % 2);
    GcnParams params = GcnParams::Initialize(GcnDims{}, 500 + t);
    testing::GradCheckResult r = testing::CheckGradient(params, inst, labels, 1e-5, 1e-4, 1e-8);
    checked += r.checked;
    failures += r.failures;
    skipped += r.kink_skipped;
    smaller += r.smaller_step;
    worst = std::max(worst, r.worst_relative_error);
  }
  const double t = SecondsSince(start);
  return {failures == 0 && skipped == 0 && t < 60.0,
          Format("%lld entries compared (%lld with a smaller step next to a ReLU kink), %lld "
                 "above 1e-4, worst relative error %.2e, %lld not comparable, %.1f s",
                 static_cast<long long>(checked), static_cast<long long>(smaller),
                 static_cast<long long>(failures), worst, static_cast<long long>(skipped), t)};
}

Outcome PermutationEquivariance() {
  std::mt19937_64 rng(2718);
  double worst = 0.0;
  GcnParams params = GcnParams::Initialize(GcnDims{}, 11);
  for (int t = 0; t < 20; ++t) {
    MipInstance inst =
        t % 2 == 0 ? Track(testing::RandomBinaryInstance(rng, 8 + t, 5 + t % 7))
                   : Track(GenerateFamilyInstance(kFamilies[(t / 2) % 4], FamilyScale{30, 3, 20, 30},
                                                  7000 + t));
    const std::vector<int> perm = testing::RandomPermutation(rng, inst.num_vars());
    const std::vector<int> row_perm = testing::RandomPermutation(rng, inst.num_rows());
    const ProbabilityVector p = Predict(params, inst);
    const ProbabilityVector q = Predict(params, testing::Permuted(inst, perm, row_perm));
    for (int j = 0; j < inst.num_vars(); ++j) worst = std::max(worst, std::abs(q[perm[j]] - p[j]));
  }
  return {worst <= 1e-9, Format("20 instances, max |p_perm - perm(p)| = %.2e", worst)};
}

Outcome TrainingSignal() {
  const auto start = Clock::now();
  ExperimentConfig config;
  config.family = Family::kVertexCover;
  config.train_size = 250;
  config.scale.n_nodes = 50;
  config.scale.affinity = 4;
  config.train_seed = 5001;
  Budget budget;
  budget.time_limit_s = 10.0;
  LabelOutcome labels = LabelInstances(TrackAll(GenerateTrainSet(config)), budget);
  TrainConfig tc;
  tc.validation_fraction = 0.2;
  tc.epochs = 300;
  TrainResult r = Train(labels.labeled, tc);
  double ones = 0, total = 0;
  for (int idx : r.validation_indices) {
    for (int y : labels.labeled[idx].labels) ones += y;
    total += static_cast<double>(labels.labeled[idx].labels.size());
  }
  const double majority = std::max(ones, total - ones) / total;
  const EpochLog& first = r.log.front();
  const EpochLog& last = r.log.back();
  const double t = SecondsSince(start);
  const bool pass = labels.labeled.size() == 250 && r.validation_size == 50 &&
                    last.val_loss <= 0.7 * first.val_loss &&
                    last.val_accuracy >= majority + 0.05 && t < 600.0;
  return {pass, Format("train/val %d/%d, val CE %.4f -> %.4f (ratio %.3f), val acc %.3f vs "
                       "majority %.3f, %.1f s",
                       r.train_size, r.validation_size, first.val_loss, last.val_loss,
                       last.val_loss / first.val_loss, last.val_accuracy, majority, t)};
}

// Per-family weights trained on small labeled instances.
std::map<Family, GcnParams> TrainFamilyWeights() {
  std::map<Family, GcnParams> weights;
  for (Family family : kFamilies) {
    const auto start = Clock::now();
    ExperimentConfig config;
    config.family = family;
    config.train_size = 200;
    config.scale.n_nodes = 50;
    config.scale.n_bids = 75;
    config.scale.n_items = 50;
    config.train_seed = 9000;
    Budget budget;
    budget.time_limit_s = 10.0;
    LabelOutcome labels = LabelInstances(TrackAll(GenerateTrainSet(config)), budget);
    TrainConfig tc;
    tc.epochs = 300;
    TrainResult r = Train(labels.labeled, tc);
    std::printf("  weights %-3s: %zu labeled, best epoch %d, val CE %.4f, val acc %.3f, %.1f s\n",
                FamilyName(family).c_str(), labels.labeled.size(), r.best_epoch,
                r.log[r.best_epoch].val_loss, r.log[r.best_epoch].val_accuracy,
                SecondsSince(start));
    weights[family] = r.params;
  }
  return weights;
}

Outcome FeasibilityRate(const std::map<Family, GcnParams>& weights) {
  std::string detail;
  bool pass = true;
  for (Family family : kFamilies) {
    ExperimentConfig config;
    config.family = family;
    config.eval_size = 30;
    config.scale.n_nodes = 200;
    config.scale.affinity = 4;
    config.scale.n_items = 100;
    config.scale.n_bids = 150;
    Budget budget;
    budget.time_limit_s = 5.0;
    int found = 0;
    double worst_time = 0.0;
    for (const MipInstance& inst : TrackAll(GenerateEvalSet(config))) {
      SearchRecord r = BpRb(inst, weights.at(family), 0.4, budget);
      if (r.incumbent && Evaluate(inst, r.incumbent->assignment).feasible) ++found;
      if (r.first_feasible_time) worst_time = std::max(worst_time, *r.first_feasible_time);
    }
    pass = pass && found == 30;
    detail += Format("%s %d/30 (max first-feasible %.3f s)  ", FamilyName(family).c_str(), found,
                     worst_time);
  }
  return {pass, detail};
}

// Gap of a minimization-sense objective to the optimum, relative to |opt|.
double Gap(const SearchRecord& record, double optimum) {
  if (!record.incumbent) return 1.0;
  return (record.incumbent->objective - optimum) / std::max(std::abs(optimum), 1e-9);
}

// Asserted with the exact node solver, which solves every tree node as a
// sub-problem; the single-dive node solver is measured and reported.
Outcome QualityTrend(const std::map<Family, GcnParams>& weights) {
  std::string detail;
  bool pass = true;
  SearchOptions exact_nodes;
  exact_nodes.node_solver = NodeSolver::kExact;
  for (Family family : kFamilies) {
    ExperimentConfig config;
    config.family = family;
    config.eval_size = 20;
    config.eval_seed = 3000000;
    config.scale.n_nodes = 100;
    config.scale.affinity = 4;
    config.scale.n_bids = 100;
    config.scale.n_items = 67;
    Budget exact_budget;
    exact_budget.time_limit_s = 30.0;
    Budget budget;
    budget.time_limit_s = 5.0;
    const bool maximize = family == Family::kIndependentSet || family == Family::kAuction;
    const GcnParams& params = weights.at(family);
    double gap_sum = 0.0, dive_gap_sum = 0.0;
    int proven = 0;
    std::vector<double> bp_common, round_common;
    int round_found = 0;
    for (const MipInstance& inst : TrackAll(GenerateEvalSet(config))) {
      SearchRecord bp = BpRb(inst, params, 0.4, budget, exact_nodes);
      SearchRecord dive = BpRb(inst, params, 0.4, budget);
      SearchRecord rounding = RoundingBaseline(inst, Predict(params, inst));
      if (rounding.incumbent) ++round_found;
      if (bp.incumbent && rounding.incumbent) {
        bp_common.push_back(inst.ToOriginalSense(bp.incumbent->objective));
        round_common.push_back(inst.ToOriginalSense(rounding.incumbent->objective));
      }
      ExactResult exact = ExactBnb(inst, exact_budget);
      if (exact.status != ExactStatus::kOptimal || !exact.record.incumbent) continue;
      ++proven;
      gap_sum += Gap(bp, exact.record.incumbent->objective);
      dive_gap_sum += Gap(dive, exact.record.incumbent->objective);
    }
    const double mean_gap = proven > 0 ? gap_sum / proven : 1.0;
    const double dive_gap = proven > 0 ? dive_gap_sum / proven : 1.0;
    bool no_worse = true;
    double g_bp = 0.0, g_round = 0.0;
    if (!bp_common.empty()) {
      g_bp = ShiftedGeomean(bp_common);
      g_round = ShiftedGeomean(round_common);
      no_worse = maximize ? g_bp >= g_round - 1e-9 : g_bp <= g_round + 1e-9;
    }
    pass = pass && proven >= 10 && mean_gap <= 0.15 && no_worse;
    detail += Format("\n    %s: optimum proven on %d/20; mean gap %.2f%% (dive node solver "
                     "%.2f%%); shifted geomean bp_rb %.3f vs rounding %.3f over the %zu "
                     "instances both solved (rounding feasible on %d/20)",
                     FamilyName(family).c_str(), proven, 100.0 * mean_gap, 100.0 * dive_gap,
                     g_bp, g_round, bp_common.size(), round_found);
  }
  return {pass, "node solver exact, eta 0.4, 5 s per instance" + detail};
}

Outcome EtaSweep(const std::map<Family, GcnParams>& weights) {
  std::string detail;
  bool monotone = true;
  for (Family family : kFamilies) {
    ExperimentConfig config;
    config.family = family;
    config.eval_size = 20;
    config.eval_seed = 4000000;
    config.scale.n_nodes = 100;
    config.scale.n_bids = 100;
    config.scale.n_items = 67;
    Budget budget;
    budget.time_limit_s = 5.0;
    const std::vector<MipInstance> instances = TrackAll(GenerateEvalSet(config));
    const std::vector<double> etas = DefaultSweepEtas();
    std::vector<SweepBlock> blocks = SweepFixedPortion(instances, weights.at(family), etas,
                                                       budget, ProblemLabel(family));
    for (size_t b = 1; b < blocks.size(); ++b) {
      for (size_t i = 0; i < instances.size(); ++i) {
        if (blocks[b].free_vars[i] > blocks[b - 1].free_vars[i]) monotone = false;
      }
    }
    detail += FamilyName(family) + " |B'|";
    for (const SweepBlock& block : blocks) detail += Format(" %.1f", block.mean_free_vars);
    if (family == Family::kDominatingSet) {
      auto mean_first = [](const SweepBlock& block) {
        double sum = 0.0;
        int count = 0;
        for (const ResultRow& row : block.rows) {
          if (row.first_time) {
            sum += *row.first_time;
            ++count;
          }
        }
        return count > 0 ? sum / count : NAN;
      };
      const double t2 = mean_first(blocks.front());
      const double t8 = mean_first(blocks.back());
      detail += Format(" (DS mean first-feasible time eta=0.2 %.4f s, eta=0.8 %.4f s: %s)", t2, t8,
                       t8 <= t2 ? "trend holds" : "trend not observed");
    }
    detail += "  ";
  }
  return {monotone, detail};
}

Outcome ExactOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(161616);
  Budget budget;
  budget.time_limit_s = 60.0;
  int mismatches = 0, not_optimal = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + static_cast<int>(rng() % 16);
    MipInstance inst = Track(testing::RandomBinaryInstance(rng, n, 1 + static_cast<int>(rng() % 15)));
    testing::BruteOptimum brute = testing::BruteForceOptimum(inst);
    ExactResult r = ExactBnb(inst, budget);
    if (r.status != ExactStatus::kOptimal) {
      ++not_optimal;
      continue;
    }
    if (!brute.feasible) ++infeasible;
    if (r.record.incumbent.has_value() != brute.feasible ||
        (brute.feasible && std::abs(r.record.incumbent->objective - brute.objective) > 1e-9)) {
      ++mismatches;
    }
  }
  const double t = SecondsSince(start);
  return {mismatches == 0 && not_optimal == 0 && t < 300.0,
          Format("500 instances (%d infeasible), %d mismatches, %d not proven, %.1f s", infeasible,
                 mismatches, not_optimal, t)};
}

Outcome DegeneracyIdentities(const std::map<Family, GcnParams>& weights) {
  int trace_mismatch = 0;
  Budget budget;
  budget.time_limit_s = 30.0;
  for (int t = 0; t < 50; ++t) {
    const Family family = kFamilies[t % 4];
    FamilyScale scale{40 + t, 3, 30, 45 + t};
    MipInstance inst = Track(GenerateFamilyInstance(family, scale, 8000 + t));
    SearchRecord a = BpRb(inst, weights.at(family), 0.0, budget);
    SearchRecord b = PbDfs(inst, weights.at(family), budget);
    bool same = a.trace.size() == b.trace.size() &&
                a.incumbent.has_value() == b.incumbent.has_value();
    for (size_t i = 0; same && i < a.trace.size(); ++i) {
      same = a.trace[i].node == b.trace[i].node && a.trace[i].found == b.trace[i].found &&
             a.trace[i].objective == b.trace[i].objective;
    }
    if (same && a.incumbent) {
      same = a.incumbent->assignment == b.incumbent->assignment &&
             a.incumbent->objective == b.incumbent->objective;
    }
    if (!same) ++trace_mismatch;
  }
  int geomean_mismatch = 0;
  for (double v : {0.0, 1e-6, 0.5, 3.0, 1626.8, 1e6}) {
    std::vector<double> single = {v};
    if (std::abs(ShiftedGeomean(single) - v) > 1e-9 * std::max(1.0, v)) ++geomean_mismatch;
  }
  int roundtrip_mismatch = 0;
  for (const MipInstance& inst : Generated()) {
    if (ParseInstance(SerializeInstance(inst)) != inst) ++roundtrip_mismatch;
  }
  return {trace_mismatch == 0 && geomean_mismatch == 0 && roundtrip_mismatch == 0,
          Format("bp_rb(eta=0) vs pb_dfs: %d/50 differ; shifted_geomean([v]) != v: %d/6; "
                 "parse(serialize(x)) != x: %d/%zu generated instances",
                 trace_mismatch, geomean_mismatch, roundtrip_mismatch, Generated().size())};
}

}  // namespace
}  // namespace bprb

int main() {
  using namespace bprb;
  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& outcome) {
    std::printf("[%s] criterion %d: %s\n", outcome.pass ? "PASS" : "FAIL", id, name);
    std::printf("  %s\n", outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failed;
  };
  const std::vector<SoundnessCase> cases = SoundnessCases();
  report(1, "reduction soundness", ReductionSoundness(cases));
  report(2, "redundant-row and logical-fix soundness", LocalRuleSoundness(cases));
  report(3, "gradient matches finite differences", GradientCorrectness());
  report(4, "permutation equivariance", PermutationEquivariance());
  report(5, "training signal", TrainingSignal());
  const std::map<Family, GcnParams> weights = TrainFamilyWeights();
  report(6, "bp_rb feasibility rate", FeasibilityRate(weights));
  report(7, "quality trend against the exact optimum", QualityTrend(weights));
  report(8, "eta sweep", EtaSweep(weights));
  report(9, "exact oracle against enumeration", ExactOracle());
  report(10, "degeneracy identities", DegeneracyIdentities(weights));
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
