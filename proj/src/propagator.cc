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

#include "bprb/propagator.h"

#include <algorithm>

#include "bprb/error.h"

namespace bprb {

Propagator::Propagator(const MipInstance& instance)
    : instance_(instance),
      columns_(instance.num_vars()),
      values_(instance.num_vars(), -1),
      min_activity_(instance.num_rows(), 0.0),
      queued_(instance.num_rows(), 0),
      fixed_objective_(instance.objective_constant()),
      num_free_(instance.num_vars()) {
  if (!instance.IsPureBinary()) {
    throw UnsupportedInstanceError("propagation requires a pure binary instance");
  }
  for (int i = 0; i < instance.num_rows(); ++i) {
    for (const RowEntry& e : instance.row(i).entries) {
      columns_[e.var].emplace_back(i, e.coef);
      if (e.coef < 0) min_activity_[i] += e.coef;
    }
  }
  for (double c : instance.objective()) free_negative_cost_ += std::min(c, 0.0);
}

void Propagator::Assign(int var, int value) {
  values_[var] = static_cast<int8_t>(value);
  trail_.push_back(var);
  --num_free_;
  const double c = instance_.objective()[var];
  free_negative_cost_ -= std::min(c, 0.0);
  if (value == 1) fixed_objective_ += c;
  for (const auto& [row, a] : columns_[var]) {
    double delta = 0.0;
    if (a > 0 && value == 1) delta = a;
    if (a < 0 && value == 0) delta = -a;
    if (delta == 0.0) continue;
    min_activity_[row] += delta;
    if (!queued_[row]) {
      queued_[row] = 1;
      queue_.push_back(row);
    }
  }
}

void Propagator::ClearQueue() {
  for (int row : queue_) queued_[row] = 0;
  queue_.clear();
}

bool Propagator::ProcessQueue() {
  size_t head = 0;
  while (head < queue_.size()) {
    const int i = queue_[head++];
    queued_[i] = 0;
    const Row& row = instance_.row(i);
    const double slack = row.rhs + kFeasibilityTolerance - min_activity_[i];
    if (slack < 0) {
      ClearQueue();
      return false;
    }
    for (const RowEntry& e : row.entries) {
      if (values_[e.var] >= 0) continue;
      if (e.coef > 0 && e.coef > slack) {
        Assign(e.var, 0);
      } else if (e.coef < 0 && -e.coef > slack) {
        Assign(e.var, 1);
      }
    }
  }
  queue_.clear();
  return true;
}

bool Propagator::Fix(int var, int value) {
  if (var < 0 || var >= instance_.num_vars()) {
    throw IndexError("variable " + std::to_string(var) + " out of range");
  }
  if (values_[var] >= 0) return values_[var] == value;
  Assign(var, value);
  return ProcessQueue();
}

bool Propagator::PropagateAll() {
  for (int i = 0; i < instance_.num_rows(); ++i) {
    if (!queued_[i]) {
      queued_[i] = 1;
      queue_.push_back(i);
    }
  }
  return ProcessQueue();
}

void Propagator::Backtrack(size_t trail_size) {
  while (trail_.size() > trail_size) {
    const int var = trail_.back();
    trail_.pop_back();
    const int value = values_[var];
    values_[var] = -1;
    ++num_free_;
    const double c = instance_.objective()[var];
    free_negative_cost_ += std::min(c, 0.0);
    if (value == 1) fixed_objective_ -= c;
    for (const auto& [row, a] : columns_[var]) {
      if (a > 0 && value == 1) min_activity_[row] -= a;
      if (a < 0 && value == 0) min_activity_[row] += a;
    }
  }
}

Assignment Propagator::ToAssignment() const {
  Assignment x(instance_.num_vars());
  for (int j = 0; j < instance_.num_vars(); ++j) {
    if (values_[j] >= 0) x.Set(j, values_[j]);
  }
  return x;
}

}  // namespace bprb
