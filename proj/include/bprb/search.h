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

#ifndef BPRB_SEARCH_H_
#define BPRB_SEARCH_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bprb/gcn.h"
#include "bprb/mip.h"
#include "bprb/propagator.h"
#include "bprb/reduction.h"
#include "bprb/scores.h"

namespace bprb {

struct Budget {
  double time_limit_s = 50.0;
  int64_t node_limit = std::numeric_limits<int64_t>::max();
  // Maximum number of branching decisions inside one node (dive steps, or
  // search nodes for the exact node solver).
  int64_t dive_limit = std::numeric_limits<int64_t>::max();

  void Validate() const;
};

// Node queue of the guided tree. Node 0 is the root, node j in 1..n flips
// the j-th most certain variable after fixing the j-1 more certain ones to
// their prediction, node n+1 is the fully predicted assignment. Exploration
// visits n+1 first, then n, n-1, ..., 1; the root is structural only.
struct TreePlan {
  std::vector<int> queue;
  std::vector<int> exploration;
};

TreePlan GenerateTree(const ScoreVector& scores);

// The (variable, value) fixings defining node `node`. Nodes 0 and n + 1 fix
// nothing up front: node n + 1 is the plain predicted dive.
std::vector<std::pair<int, int>> NodePrefix(int node, const ScoreVector& scores,
                                            std::span<const double> p);

// Applies the node prefix, then fixes the remaining free variables in score
// order to their predicted value with propagation after each fix. A value
// that propagates into a conflict is flipped once; a second conflict ends the
// dive. Returns a total assignment of `reduced.sub`.
std::optional<Assignment> DiveComplete(const ReducedInstance& reduced, int node,
                                       const ScoreVector& scores, std::span<const double> p,
                                       int64_t dive_limit = std::numeric_limits<int64_t>::max());

struct NodeTrace {
  int node = 0;
  bool found = false;
  double objective = 0.0;  // parent objective (minimization sense) when found
};

struct Incumbent {
  Assignment assignment;  // parent index space
  double objective = 0.0; // minimization sense, includes offsets
};

struct SearchRecord {
  std::optional<Incumbent> incumbent;
  int64_t nodes_processed = 0;
  std::optional<double> first_feasible_time;
  std::optional<double> best_solution_time;
  std::optional<double> first_objective;
  double total_time = 0.0;
  double eta_requested = 0.0;
  double eta_used = 0.0;
  int conflict_retries = 0;
  // Free variables after reducing with the requested eta; 0 when that
  // fixing was proven infeasible.
  int requested_free_vars = 0;
  ReductionStats reduction;  // of the reduction actually searched
  // One entry per processed tree node; for ExactBnb, one per improvement
  // (node = search nodes visited so far).
  std::vector<NodeTrace> trace;
  bool budget_exhausted = false;
};

enum class BoundMode {
  // fixed objective + sum of negative costs of free variables.
  kObjectiveOnly,
  // kObjectiveOnly plus, for a set of violated rows with disjoint repairing
  // variables, the fractional-knapsack cost of repairing each row from the
  // cost-minimizing completion. The subtree is fathomed when that completion
  // is feasible.
  kRowPacking,
};

// kDive completes every node with one propagation dive. kExact keeps the
// dive for node n + 1 and runs a budgeted branch and bound below the prefix
// of every other node; nodes 1..n + 1 partition the search space, so a run
// that finishes the tree is exact on the reduced instance.
enum class NodeSolver { kDive, kExact };

struct SearchOptions {
  NodeSolver node_solver = NodeSolver::kDive;
  BoundMode exact_bound = BoundMode::kRowPacking;  // for NodeSolver::kExact
};

using Predictor = std::function<ProbabilityVector(const MipInstance&)>;

// Predict, fix the eta most certain variables, reduce, predict again on the
// reduced problem and run the guided depth-first search on it. A fixing that
// the reduction proves infeasible is retried with eta halved (three times),
// then with eta = 0. With nothing fixed the first prediction is reused on
// the full instance.
SearchRecord BpRb(const MipInstance& instance, const Predictor& predictor, double eta,
                  const Budget& budget, const SearchOptions& options = {});
SearchRecord BpRb(const MipInstance& instance, const GcnParams& params, double eta,
                  const Budget& budget, const SearchOptions& options = {});

// Guided depth-first search on the full instance with a single prediction.
SearchRecord PbDfs(const MipInstance& instance, const Predictor& predictor,
                   const Budget& budget, const SearchOptions& options = {});
SearchRecord PbDfs(const MipInstance& instance, const GcnParams& params,
                   const Budget& budget, const SearchOptions& options = {});

// Evaluates the rounded prediction; the incumbent is set only if feasible.
SearchRecord RoundingBaseline(const MipInstance& instance, std::span<const double> p);

enum class ExactStatus { kOptimal, kBudgetExhausted };

struct ExactOptions {
  BoundMode bound = BoundMode::kRowPacking;
};

struct ExactResult {
  ExactStatus status = ExactStatus::kOptimal;
  SearchRecord record;
};

// Depth-first branch and bound: branch on the lowest-index free variable,
// value 1 first, propagate after each fix, prune when the bound reaches the
// incumbent.
ExactResult ExactBnb(const MipInstance& instance, const Budget& budget,
                     const ExactOptions& options = {});

std::string ExactStatusName(ExactStatus status);

}  // namespace bprb

#endif  // BPRB_SEARCH_H_
