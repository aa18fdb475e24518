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

#ifndef BPRB_REDUCTION_H_
#define BPRB_REDUCTION_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bprb/mip.h"

namespace bprb {

enum class FixSource { kGreedy, kLogicalZero, kLogicalOne };

struct Fix {
  int value = 0;
  FixSource source = FixSource::kGreedy;
};

// Variables fixed to 0/1, keyed by parent variable index. A variable can be
// fixed only once; contradicting fixes are reported as conflicts by the
// reduction, never stored.
class FixedSet {
 public:
  // Returns false (and changes nothing) if `var` is already fixed to the other
  // value. Re-fixing to the same value keeps the original source.
  bool Add(int var, int value, FixSource source);

  bool Contains(int var) const { return fixes_.count(var) > 0; }
  int Value(int var) const { return fixes_.at(var).value; }
  int size() const { return static_cast<int>(fixes_.size()); }
  bool empty() const { return fixes_.empty(); }
  int CountSource(FixSource source) const;
  const std::map<int, Fix>& entries() const { return fixes_; }

 private:
  std::map<int, Fix> fixes_;
};

// Greedy fixing: the k = floor(eta * n) most certain variables (z descending,
// ties by index) fixed to their rounded prediction.
FixedSet SelectFixSet(std::span<const double> p, double eta);

// Rows with the fixed contributions moved into the right-hand side. Row i of
// `rows` corresponds to parent row i and only keeps free variables (parent
// indices).
struct FoldedSystem {
  std::vector<Row> rows;
  double objective_offset = 0.0;
};

FoldedSystem ApplyFixing(const MipInstance& instance, const FixedSet& fixed);

// True iff sum of positive coefficients of a folded row fits its rhs, i.e.
// every 0/1 completion satisfies it.
bool DetectRedundant(const Row& folded);

// Single-row implications of a folded row: positive-coefficient variables
// that cannot be 1 and negative-coefficient variables that cannot be 0.
std::vector<std::pair<int, int>> LogicalFix(const Row& folded);

struct ReductionStats {
  int greedy_fixes = 0;
  int logical_fixes = 0;
  int removed_rows = 0;
  int free_vars = 0;
  int remaining_rows = 0;
  int sweeps = 0;
};

struct ReducedInstance {
  MipInstance sub;                 // over the surviving free variables
  FixedSet fixed;                  // parent indices
  std::vector<int> removed_rows;   // parent rows dropped as redundant
  std::vector<int> kept_rows;      // sub row -> parent row
  double objective_offset = 0.0;   // sum of c_j * fixed value
  std::vector<int> sub_to_parent;  // sub var -> parent var
  std::vector<int> parent_to_sub;  // parent var -> sub var, -1 when fixed
  ReductionStats stats;

  // Combines a total assignment of `sub` with the fixed values.
  Assignment Lift(const Assignment& sub_assignment) const;
  // The identity reduction (nothing fixed, nothing removed).
  static ReducedInstance Identity(const MipInstance& instance);
};

struct Conflict {
  int row = -1;
  std::string explanation;
};

using ReductionOutcome = std::variant<ReducedInstance, Conflict>;

// Repeats {fold, drop redundant rows, collect logical fixes} in sweeps over
// the rows in ascending order, applying each sweep's fixes as one batch,
// until a sweep yields no new fix. Returns a Conflict when a row cannot be
// satisfied or a variable is forced to both values.
ReductionOutcome ReduceToFixpoint(const MipInstance& instance, const FixedSet& initial);

}  // namespace bprb

#endif  // BPRB_REDUCTION_H_
