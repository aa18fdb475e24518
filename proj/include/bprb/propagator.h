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

#ifndef BPRB_PROPAGATOR_H_
#define BPRB_PROPAGATOR_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bprb/mip.h"

namespace bprb {

// Incremental single-row propagation over a pure binary instance.
//
// For every row it maintains the minimum activity (fixed contributions plus
// all free negative coefficients). A row with minimum activity above its rhs
// is a conflict; otherwise a free x_k with a_k > 0 is forced to 0 when
// a_k + min_activity > rhs and a free x_k with a_k < 0 is forced to 1 when
// min_activity - a_k > rhs. These are the same implications the reduction
// derives, applied eagerly.
class Propagator {
 public:
  explicit Propagator(const MipInstance& instance);

  const MipInstance& instance() const { return instance_; }
  int Value(int var) const { return values_[var]; }
  bool IsFree(int var) const { return values_[var] < 0; }
  int num_free() const { return num_free_; }

  // Fixes `var` and propagates to a fixpoint. Returns false on a conflict,
  // after which the caller must Backtrack. Fixing a variable to the value it
  // already has is a no-op.
  bool Fix(int var, int value);
  // Checks every row once; use at the root.
  bool PropagateAll();

  size_t TrailSize() const { return trail_.size(); }
  void Backtrack(size_t trail_size);

  // c'x over the fixed variables plus the objective constant.
  double FixedObjective() const { return fixed_objective_; }
  // FixedObjective() + sum of negative costs of free variables.
  double LowerBound() const { return fixed_objective_ + free_negative_cost_; }

  // The fixed values; free variables stay unassigned.
  Assignment ToAssignment() const;

 private:
  void Assign(int var, int value);
  bool ProcessQueue();
  void ClearQueue();

  const MipInstance& instance_;
  std::vector<std::vector<std::pair<int, double>>> columns_;
  std::vector<int8_t> values_;
  std::vector<double> min_activity_;
  std::vector<int> trail_;
  std::vector<int> queue_;
  std::vector<char> queued_;
  double fixed_objective_ = 0.0;
  double free_negative_cost_ = 0.0;
  int num_free_ = 0;
};

}  // namespace bprb

#endif  // BPRB_PROPAGATOR_H_
