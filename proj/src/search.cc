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

#include "bprb/search.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "bprb/error.h"

namespace bprb {
namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void RequireBinary(const MipInstance& instance) {
  if (!instance.IsPureBinary()) {
    throw UnsupportedInstanceError("search requires a pure binary instance; '" +
                                   instance.name() + "' has integer or continuous variables");
  }
}

ProbabilityVector CheckedPredict(const Predictor& predictor, const MipInstance& instance) {
  ProbabilityVector p = predictor(instance);
  if (static_cast<int>(p.size()) != instance.num_vars()) {
    throw DimensionError("predictor returned " + std::to_string(p.size()) +
                         " probabilities for " + std::to_string(instance.num_vars()) +
                         " variables");
  }
  return p;
}

// Updates incumbent and timing fields when `objective` improves strictly.
void OfferSolution(SearchRecord& record, Assignment assignment, double objective, double now) {
  if (!record.first_feasible_time) {
    record.first_feasible_time = now;
    record.first_objective = objective;
  }
  if (record.incumbent && objective >= record.incumbent->objective - kFeasibilityTolerance) {
    return;
  }
  record.incumbent = Incumbent{std::move(assignment), objective};
  record.best_solution_time = now;
}

// Lower bound on the best completion of the propagator's current state.
// The cost-minimizing completion x0 sets a free variable to 1 iff its cost is
// negative. A row violated by x0 has to be repaired by flipping some of its
// "repairing" variables (those whose flip lowers the row activity), and the
// cheapest repair is bounded below by a fractional knapsack. Repair costs of
// rows whose repairing variables are pairwise disjoint add up.
//
// A second, Lagrangian bound relaxes the rows with multipliers y >= 0 that
// cancel negative costs through the cheapest row of each column;
// the larger of the two bounds is reported.
class RowPackingBound {
 public:
  explicit RowPackingBound(const MipInstance& instance)
      : instance_(instance),
        used_(instance.num_vars(), 0),
        columns_(instance.num_vars()),
        multiplier_(instance.num_rows(), 0.0),
        residual_(instance.num_rows(), 0.0) {
    for (int i = 0; i < instance.num_rows(); ++i) {
      for (const RowEntry& e : instance.row(i).entries) columns_[e.var].push_back({i, e.coef});
    }
  }

  struct Result {
    double bound = 0.0;
    bool infeasible = false;
    bool baseline_feasible = false;
  };

  Result Evaluate(const Propagator& prop) {
    Result result;
    result.bound = prop.LowerBound();
    const std::vector<double>& c = instance_.objective();
    violated_.clear();
    for (int i = 0; i < instance_.num_rows(); ++i) {
      const Row& row = instance_.row(i);
      double activity = 0.0;
      double repair_capacity = 0.0;
      for (const RowEntry& e : row.entries) {
        const int x = prop.IsFree(e.var) ? Baseline(c[e.var]) : prop.Value(e.var);
        activity += e.coef * x;
        if (prop.IsFree(e.var) && Repairs(e.coef, c[e.var])) {
          repair_capacity += std::abs(e.coef);
        }
      }
      const double deficit = activity - row.rhs;
      if (deficit <= kFeasibilityTolerance) continue;
      if (repair_capacity < deficit - kFeasibilityTolerance) {
        result.infeasible = true;
        return result;
      }
      violated_.push_back({i, deficit, RepairCost(prop, row, deficit)});
    }
    if (violated_.empty()) {
      result.baseline_feasible = true;
      return result;
    }
    const double lagrangian = LagrangianBound(prop);
    std::stable_sort(violated_.begin(), violated_.end(),
                     [](const Violation& a, const Violation& b) { return a.cost > b.cost; });
    std::fill(used_.begin(), used_.end(), 0);
    for (const Violation& v : violated_) {
      const Row& row = instance_.row(v.row);
      bool disjoint = true;
      for (const RowEntry& e : row.entries) {
        if (prop.IsFree(e.var) && Repairs(e.coef, c[e.var]) && used_[e.var]) {
          disjoint = false;
          break;
        }
      }
      if (!disjoint) continue;
      for (const RowEntry& e : row.entries) {
        if (prop.IsFree(e.var) && Repairs(e.coef, c[e.var])) used_[e.var] = 1;
      }
      result.bound += v.cost;
    }
    result.bound = std::max(result.bound, lagrangian);
    return result;
  }

  // x0 completed with the fixed values.
  Assignment BaselineAssignment(const Propagator& prop) const {
    Assignment x = prop.ToAssignment();
    for (int j = 0; j < instance_.num_vars(); ++j) {
      if (prop.IsFree(j)) x.Set(j, Baseline(instance_.objective()[j]));
    }
    return x;
  }

 private:
  struct Violation {
    int row;
    double deficit;
    double cost;
  };

  // L(y) = c'x_fixed + sum_i y_i (fixed activity_i - rhs_i)
  //        + sum_{free j} min(0, c_j + sum_i y_i a_ij),
  // valid for any y >= 0. y is built greedily: each free column with a
  // negative reduced cost raises the multiplier of the row where cancelling
  // it costs least, i.e. the smallest residual rhs per unit coefficient.
  double LagrangianBound(const Propagator& prop) {
    const std::vector<double>& c = instance_.objective();
    for (int i = 0; i < instance_.num_rows(); ++i) {
      double residual = instance_.row(i).rhs;
      for (const RowEntry& e : instance_.row(i).entries) {
        if (!prop.IsFree(e.var)) residual -= e.coef * prop.Value(e.var);
      }
      residual_[i] = residual;
      multiplier_[i] = 0.0;
    }
    double bound = prop.FixedObjective();
    for (int j = 0; j < instance_.num_vars(); ++j) {
      if (!prop.IsFree(j)) continue;
      double reduced = c[j];
      int best_row = -1;
      double best_ratio = 0.0, best_coef = 0.0;
      for (const auto& [row, coef] : columns_[j]) {
        reduced += multiplier_[row] * coef;
        if (coef > 0.0 && residual_[row] >= 0.0) {
          const double ratio = residual_[row] / coef;
          if (best_row < 0 || ratio < best_ratio) {
            best_row = row;
            best_ratio = ratio;
            best_coef = coef;
          }
        }
      }
      if (reduced < 0.0 && best_row >= 0) {
        multiplier_[best_row] += -reduced / best_coef;
      }
    }
    for (int i = 0; i < instance_.num_rows(); ++i) bound -= multiplier_[i] * residual_[i];
    for (int j = 0; j < instance_.num_vars(); ++j) {
      if (!prop.IsFree(j)) continue;
      double reduced = c[j];
      for (const auto& [row, coef] : columns_[j]) reduced += multiplier_[row] * coef;
      bound += std::min(0.0, reduced);
    }
    return bound;
  }

  static int Baseline(double cost) { return cost < 0.0 ? 1 : 0; }
  // Flipping x from its baseline lowers the activity of a row with
  // coefficient a.
  static bool Repairs(double a, double cost) { return Baseline(cost) == 1 ? a > 0.0 : a < 0.0; }

  double RepairCost(const Propagator& prop, const Row& row, double deficit) {
    items_.clear();
    for (const RowEntry& e : row.entries) {
      const double cost = instance_.objective()[e.var];
      if (prop.IsFree(e.var) && Repairs(e.coef, cost)) {
        items_.push_back({std::abs(cost), std::abs(e.coef)});
      }
    }
    std::sort(items_.begin(), items_.end(), [](const auto& a, const auto& b) {
      return a.first * b.second < b.first * a.second;
    });
    double remaining = deficit;
    double total = 0.0;
    for (const auto& [cost, gain] : items_) {
      if (remaining <= 0.0) break;
      const double take = std::min(1.0, remaining / gain);
      total += take * cost;
      remaining -= take * gain;
    }
    return total;
  }

  const MipInstance& instance_;
  std::vector<char> used_;
  std::vector<std::vector<std::pair<int, double>>> columns_;
  std::vector<double> multiplier_;
  std::vector<double> residual_;
  std::vector<Violation> violated_;
  std::vector<std::pair<double, double>> items_;
};

// Exhaustive depth-first search below the propagator's current state.
class BranchAndBound {
 public:
  BranchAndBound(Propagator& prop, const Stopwatch& clock, double time_limit,
                 int64_t node_limit, std::optional<double> cutoff, BoundMode mode)
      : prop_(prop),
        clock_(clock),
        time_limit_(time_limit),
        node_limit_(node_limit),
        cutoff_(cutoff),
        mode_(mode),
        packing_(prop.instance()) {}

  std::function<void(const Assignment&, double)> on_improve;

  void Run() { Dfs(); }
  bool exhausted() const { return exhausted_; }
  int64_t nodes() const { return nodes_; }
  const std::optional<Assignment>& best() const { return best_; }

 private:
  void Improve(Assignment x, double objective) {
    cutoff_ = objective;
    best_ = std::move(x);
    if (on_improve) on_improve(*best_, objective);
  }

  bool Pruned(double bound) const {
    return cutoff_ && bound >= *cutoff_ - kFeasibilityTolerance;
  }

  void Dfs() {
    if (nodes_ >= node_limit_ || clock_.Seconds() > time_limit_) {
      exhausted_ = true;
      return;
    }
    ++nodes_;
    if (Pruned(prop_.LowerBound())) return;
    if (mode_ == BoundMode::kRowPacking && prop_.num_free() > 0) {
      const RowPackingBound::Result bound = packing_.Evaluate(prop_);
      if (bound.infeasible || Pruned(bound.bound)) return;
      if (bound.baseline_feasible) {
        Improve(packing_.BaselineAssignment(prop_), prop_.LowerBound());
        return;
      }
    }
    int var = -1;
    for (int j = 0; j < prop_.instance().num_vars(); ++j) {
      if (prop_.IsFree(j)) {
        var = j;
        break;
      }
    }
    if (var < 0) {
      Improve(prop_.ToAssignment(), prop_.FixedObjective());
      return;
    }
    for (int value : {1, 0}) {
      const size_t mark = prop_.TrailSize();
      if (prop_.Fix(var, value)) Dfs();
      prop_.Backtrack(mark);
      if (exhausted_) return;
    }
  }

  Propagator& prop_;
  const Stopwatch& clock_;
  double time_limit_;
  int64_t node_limit_;
  std::optional<double> cutoff_;
  BoundMode mode_;
  RowPackingBound packing_;
  std::optional<Assignment> best_;
  int64_t nodes_ = 0;
  bool exhausted_ = false;
};

bool ApplyPrefix(Propagator& prop, int node, const ScoreVector& scores,
                 std::span<const double> p) {
  for (const auto& [var, value] : NodePrefix(node, scores, p)) {
    if (!prop.Fix(var, value)) return false;
  }
  return true;
}

// Dive from the propagator's current state; restores it before returning.
std::optional<Assignment> Dive(Propagator& prop, int node, const ScoreVector& scores,
                               std::span<const double> p, int64_t dive_limit) {
  const size_t root = prop.TrailSize();
  std::optional<Assignment> result;
  const int n = static_cast<int>(scores.order.size());
  if (ApplyPrefix(prop, node, scores, p)) {
    const int first = node <= n ? node : 0;
    int64_t decisions = 0;
    bool ok = true;
    for (int r = first; r < n && ok; ++r) {
      const int var = scores.order[r];
      if (!prop.IsFree(var)) continue;
      if (++decisions > dive_limit) {
        ok = false;
        break;
      }
      const int predicted = PredictedValue(p[var]);
      const size_t mark = prop.TrailSize();
      if (prop.Fix(var, predicted)) continue;
      prop.Backtrack(mark);
      if (prop.Fix(var, 1 - predicted)) continue;
      ok = false;
    }
    if (ok) result = prop.ToAssignment();
  }
  prop.Backtrack(root);
  return result;
}

void GuidedSearch(const MipInstance& parent, const ReducedInstance& red,
                  std::span<const double> p, const Budget& budget,
                  const SearchOptions& options, const Stopwatch& clock,
                  SearchRecord& record) {
  const ScoreVector scores = ComputeScores(p);
  const TreePlan plan = GenerateTree(scores);
  Propagator prop(red.sub);
  const bool root_feasible = prop.PropagateAll();
  const int n = red.sub.num_vars();

  for (int node : plan.exploration) {
    if (record.nodes_processed >= budget.node_limit || clock.Seconds() > budget.time_limit_s) {
      record.budget_exhausted = true;
      break;
    }
    ++record.nodes_processed;
    std::optional<Assignment> sub_solution;
    if (root_feasible) {
      if (options.node_solver == NodeSolver::kDive || node > n) {
        sub_solution = Dive(prop, node, scores, p, budget.dive_limit);
      } else {
        const size_t root = prop.TrailSize();
        if (ApplyPrefix(prop, node, scores, p)) {
          std::optional<double> cutoff;
          if (record.incumbent) cutoff = record.incumbent->objective - red.objective_offset;
          BranchAndBound bnb(prop, clock, budget.time_limit_s, budget.dive_limit, cutoff,
                             options.exact_bound);
          bnb.Run();
          sub_solution = bnb.best();
        }
        prop.Backtrack(root);
      }
    }
    NodeTrace trace{node, false, 0.0};
    if (sub_solution) {
      Assignment lifted = red.Lift(*sub_solution);
      const EvalResult eval = Evaluate(parent, lifted);
      if (!eval.feasible) {
        throw std::logic_error("guided search produced an infeasible assignment");
      }
      trace.found = true;
      trace.objective = eval.objective;
      OfferSolution(record, std::move(lifted), eval.objective, clock.Seconds());
    }
    record.trace.push_back(trace);
  }
}

}  // namespace

void Budget::Validate() const {
  if (!(time_limit_s > 0.0) || node_limit <= 0 || dive_limit <= 0) {
    throw InvalidParameterError("budget limits must be positive");
  }
}

TreePlan GenerateTree(const ScoreVector& scores) {
  const int n = static_cast<int>(scores.order.size());
  TreePlan plan;
  plan.queue.resize(n + 2);
  for (int j = 0; j <= n + 1; ++j) plan.queue[j] = j;
  plan.exploration.reserve(n + 1);
  for (int j = n + 1; j >= 1; --j) plan.exploration.push_back(j);
  return plan;
}

std::vector<std::pair<int, int>> NodePrefix(int node, const ScoreVector& scores,
                                            std::span<const double> p) {
  const int n = static_cast<int>(scores.order.size());
  if (node < 0 || node > n + 1) {
    throw IndexError("node " + std::to_string(node) + " outside 0.." + std::to_string(n + 1));
  }
  std::vector<std::pair<int, int>> prefix;
  if (node == 0 || node == n + 1) return prefix;
  for (int r = 0; r + 1 < node; ++r) {
    const int var = scores.order[r];
    prefix.emplace_back(var, PredictedValue(p[var]));
  }
  const int flipped = scores.order[node - 1];
  prefix.emplace_back(flipped, 1 - PredictedValue(p[flipped]));
  return prefix;
}

std::optional<Assignment> DiveComplete(const ReducedInstance& reduced, int node,
                                       const ScoreVector& scores, std::span<const double> p,
                                       int64_t dive_limit) {
  if (static_cast<int>(p.size()) != reduced.sub.num_vars() ||
      scores.order.size() != p.size()) {
    throw DimensionError("scores and probabilities must match the reduced instance");
  }
  Propagator prop(reduced.sub);
  if (!prop.PropagateAll()) return std::nullopt;
  return Dive(prop, node, scores, p, dive_limit);
}

SearchRecord BpRb(const MipInstance& instance, const Predictor& predictor, double eta,
                  const Budget& budget, const SearchOptions& options) {
  budget.Validate();
  RequireBinary(instance);
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidParameterError("eta must lie in [0, 1), got " + std::to_string(eta));
  }
  const Stopwatch clock;
  SearchRecord record;
  record.eta_requested = eta;
  const ProbabilityVector p = CheckedPredict(predictor, instance);

  double current = eta;
  std::optional<ReducedInstance> reduced;
  ProbabilityVector sub_p;
  for (int attempt = 0;; ++attempt) {
    const FixedSet fixed = SelectFixSet(p, current);
    if (fixed.empty()) {
      reduced = ReducedInstance::Identity(instance);
      sub_p = p;
      if (attempt == 0) record.requested_free_vars = instance.num_vars();
      break;
    }
    ReductionOutcome outcome = ReduceToFixpoint(instance, fixed);
    if (std::holds_alternative<Conflict>(outcome)) {
      if (attempt == 0) record.requested_free_vars = 0;
      ++record.conflict_retries;
      current = attempt < 3 ? current / 2.0 : 0.0;
      continue;
    }
    reduced = std::move(std::get<ReducedInstance>(outcome));
    if (attempt == 0) record.requested_free_vars = reduced->stats.free_vars;
    if (reduced->sub.num_vars() > 0) sub_p = CheckedPredict(predictor, reduced->sub);
    break;
  }
  record.eta_used = current;
  record.reduction = reduced->stats;
  GuidedSearch(instance, *reduced, sub_p, budget, options, clock, record);
  record.total_time = clock.Seconds();
  return record;
}

SearchRecord BpRb(const MipInstance& instance, const GcnParams& params, double eta,
                  const Budget& budget, const SearchOptions& options) {
  return BpRb(
      instance, [&params](const MipInstance& inst) { return Predict(params, inst); }, eta,
      budget, options);
}

SearchRecord PbDfs(const MipInstance& instance, const Predictor& predictor,
                   const Budget& budget, const SearchOptions& options) {
  budget.Validate();
  RequireBinary(instance);
  const Stopwatch clock;
  SearchRecord record;
  const ProbabilityVector p = CheckedPredict(predictor, instance);
  const ReducedInstance identity = ReducedInstance::Identity(instance);
  record.requested_free_vars = instance.num_vars();
  record.reduction = identity.stats;
  GuidedSearch(instance, identity, p, budget, options, clock, record);
  record.total_time = clock.Seconds();
  return record;
}

SearchRecord PbDfs(const MipInstance& instance, const GcnParams& params,
                   const Budget& budget, const SearchOptions& options) {
  return PbDfs(
      instance, [&params](const MipInstance& inst) { return Predict(params, inst); }, budget,
      options);
}

SearchRecord RoundingBaseline(const MipInstance& instance, std::span<const double> p) {
  RequireBinary(instance);
  if (static_cast<int>(p.size()) != instance.num_vars()) {
    throw DimensionError("probability vector length does not match the instance");
  }
  const Stopwatch clock;
  SearchRecord record;
  record.requested_free_vars = instance.num_vars();
  record.reduction = ReducedInstance::Identity(instance).stats;
  const std::vector<int> rounded = RoundProbabilities(p);
  Assignment x = Assignment::FromValues(rounded);
  const EvalResult eval = Evaluate(instance, x);
  record.nodes_processed = 1;
  record.trace.push_back({0, eval.feasible, eval.objective});
  if (eval.feasible) OfferSolution(record, std::move(x), eval.objective, clock.Seconds());
  record.total_time = clock.Seconds();
  return record;
}

ExactResult ExactBnb(const MipInstance& instance, const Budget& budget,
                     const ExactOptions& options) {
  budget.Validate();
  RequireBinary(instance);
  const Stopwatch clock;
  ExactResult result;
  SearchRecord& record = result.record;
  record.requested_free_vars = instance.num_vars();
  Propagator prop(instance);
  if (prop.PropagateAll()) {
    BranchAndBound bnb(prop, clock, budget.time_limit_s, budget.node_limit, std::nullopt,
                       options.bound);
    bnb.on_improve = [&](const Assignment& x, double objective) {
      OfferSolution(record, x, objective, clock.Seconds());
      record.trace.push_back({static_cast<int>(bnb.nodes()), true, objective});
    };
    bnb.Run();
    record.nodes_processed = bnb.nodes();
    record.budget_exhausted = bnb.exhausted();
  }
  result.status = record.budget_exhausted ? ExactStatus::kBudgetExhausted : ExactStatus::kOptimal;
  record.total_time = clock.Seconds();
  return result;
}

std::string ExactStatusName(ExactStatus status) {
  return status == ExactStatus::kOptimal ? "optimal" : "budget-exhausted";
}

}  // namespace bprb
