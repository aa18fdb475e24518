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

#include "bprb/reduction.h"

#include <cmath>

#include "bprb/error.h"
#include "bprb/scores.h"

namespace bprb {
namespace {

void RequireBinary(const MipInstance& instance) {
  if (!instance.IsPureBinary()) {
    throw UnsupportedInstanceError("instance '" + instance.name() +
                                   "' has non-binary variables; binarize it first "
                                   "(continuous variables are not supported)");
  }
}

// Folds the fixed variables of `row` into its rhs.
Row Fold(const Row& row, std::span<const int8_t> values) {
  Row folded;
  folded.rhs = row.rhs;
  for (const RowEntry& e : row.entries) {
    const int8_t v = values[e.var];
    if (v < 0) {
      folded.entries.push_back(e);
    } else if (v == 1) {
      folded.rhs -= e.coef;
    }
  }
  return folded;
}

}  // namespace

bool FixedSet::Add(int var, int value, FixSource source) {
  if (value != 0 && value != 1) throw InvalidParameterError("fixed values must be 0 or 1");
  auto [it, inserted] = fixes_.try_emplace(var, Fix{value, source});
  return inserted || it->second.value == value;
}

int FixedSet::CountSource(FixSource source) const {
  int count = 0;
  for (const auto& [var, fix] : fixes_) count += fix.source == source ? 1 : 0;
  return count;
}

FixedSet SelectFixSet(std::span<const double> p, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidParameterError("eta must lie in [0, 1), got " + std::to_string(eta));
  }
  const ScoreVector scores = ComputeScores(p);
  // The small slack absorbs representation error such as 0.6 * 5 = 2.9999...
  const int k = static_cast<int>(std::floor(eta * static_cast<double>(p.size()) + 1e-9));
  FixedSet fixed;
  for (int r = 0; r < k; ++r) {
    const int var = scores.order[r];
    fixed.Add(var, PredictedValue(p[var]), FixSource::kGreedy);
  }
  return fixed;
}

FoldedSystem ApplyFixing(const MipInstance& instance, const FixedSet& fixed) {
  std::vector<int8_t> values(instance.num_vars(), -1);
  FoldedSystem out;
  for (const auto& [var, fix] : fixed.entries()) {
    if (var < 0 || var >= instance.num_vars()) {
      throw IndexError("fixed variable " + std::to_string(var) + " out of range");
    }
    values[var] = static_cast<int8_t>(fix.value);
    if (fix.value == 1) out.objective_offset += instance.objective()[var];
  }
  out.rows.reserve(instance.num_rows());
  for (const Row& row : instance.rows()) out.rows.push_back(Fold(row, values));
  return out;
}

bool DetectRedundant(const Row& folded) {
  double max_activity = 0.0;
  for (const RowEntry& e : folded.entries) max_activity += std::max(e.coef, 0.0);
  return max_activity <= folded.rhs + kFeasibilityTolerance;
}

std::vector<std::pair<int, int>> LogicalFix(const Row& folded) {
  double negative_sum = 0.0;  // sum over S-
  for (const RowEntry& e : folded.entries) negative_sum += std::min(e.coef, 0.0);
  std::vector<std::pair<int, int>> forced;
  for (const RowEntry& e : folded.entries) {
    if (e.coef > 0.0) {
      if (e.coef + negative_sum > folded.rhs + kFeasibilityTolerance) forced.emplace_back(e.var, 0);
    } else if (negative_sum - e.coef > folded.rhs + kFeasibilityTolerance) {
      forced.emplace_back(e.var, 1);
    }
  }
  return forced;
}

Assignment ReducedInstance::Lift(const Assignment& sub_assignment) const {
  if (sub_assignment.size() != sub.num_vars()) {
    throw DimensionError("sub assignment has the wrong length");
  }
  Assignment parent(static_cast<int>(parent_to_sub.size()));
  for (const auto& [var, fix] : fixed.entries()) parent.Set(var, fix.value);
  for (int s = 0; s < sub.num_vars(); ++s) {
    if (sub_assignment.IsSet(s)) parent.Set(sub_to_parent[s], sub_assignment.value(s));
  }
  return parent;
}

ReducedInstance ReducedInstance::Identity(const MipInstance& instance) {
  ReducedInstance red;
  red.sub = instance;
  red.sub_to_parent.resize(instance.num_vars());
  red.parent_to_sub.resize(instance.num_vars());
  for (int j = 0; j < instance.num_vars(); ++j) red.sub_to_parent[j] = red.parent_to_sub[j] = j;
  red.kept_rows.resize(instance.num_rows());
  for (int i = 0; i < instance.num_rows(); ++i) red.kept_rows[i] = i;
  red.stats.free_vars = instance.num_vars();
  red.stats.remaining_rows = instance.num_rows();
  return red;
}

ReductionOutcome ReduceToFixpoint(const MipInstance& instance, const FixedSet& initial) {
  RequireBinary(instance);
  const int n = instance.num_vars();
  std::vector<int8_t> values(n, -1);
  for (const auto& [var, fix] : initial.entries()) {
    if (var < 0 || var >= n) {
      throw IndexError("fixed variable " + std::to_string(var) + " out of range");
    }
    values[var] = static_cast<int8_t>(fix.value);
  }
  FixedSet fixed = initial;
  std::vector<bool> active(instance.num_rows(), true);
  std::vector<int> removed;
  int sweeps = 0;

  while (true) {
    ++sweeps;
    std::map<int, std::pair<int, int>> batch;  // var -> (value, row)
    for (int i = 0; i < instance.num_rows(); ++i) {
      if (!active[i]) continue;
      const Row folded = Fold(instance.row(i), values);
      if (folded.entries.empty()) {
        if (folded.rhs < -kFeasibilityTolerance) {
          return Conflict{i, "row " + std::to_string(i) +
                                 " has no free variables left and residual rhs " +
                                 std::to_string(folded.rhs) + " < 0"};
        }
        active[i] = false;
        removed.push_back(i);
        continue;
      }
      if (DetectRedundant(folded)) {
        active[i] = false;
        removed.push_back(i);
        continue;
      }
      for (const auto& [var, value] : LogicalFix(folded)) {
        auto [it, inserted] = batch.try_emplace(var, value, i);
        if (!inserted && it->second.first != value) {
          return Conflict{i, "variable " + std::to_string(var) + " is forced to " +
                                 std::to_string(it->second.first) + " by row " +
                                 std::to_string(it->second.second) + " and to " +
                                 std::to_string(value) + " by row " + std::to_string(i)};
        }
      }
    }
    if (batch.empty()) break;
    for (const auto& [var, entry] : batch) {
      values[var] = static_cast<int8_t>(entry.first);
      fixed.Add(var, entry.first, entry.first == 0 ? FixSource::kLogicalZero : FixSource::kLogicalOne);
    }
  }

  ReducedInstance red;
  red.fixed = std::move(fixed);
  red.parent_to_sub.assign(n, -1);
  std::vector<double> objective;
  for (int j = 0; j < n; ++j) {
    if (values[j] < 0) {
      red.parent_to_sub[j] = static_cast<int>(red.sub_to_parent.size());
      red.sub_to_parent.push_back(j);
      objective.push_back(instance.objective()[j]);
    } else if (values[j] == 1) {
      red.objective_offset += instance.objective()[j];
    }
  }
  std::vector<Row> rows;
  for (int i = 0; i < instance.num_rows(); ++i) {
    if (!active[i]) continue;
    Row folded = Fold(instance.row(i), values);
    for (RowEntry& e : folded.entries) e.var = red.parent_to_sub[e.var];
    rows.push_back(std::move(folded));
    red.kept_rows.push_back(i);
  }
  std::sort(removed.begin(), removed.end());
  red.removed_rows = std::move(removed);
  red.sub = MipInstance::Binary(instance.name() + "_sub", instance.original_sense(),
                                std::move(objective), std::move(rows));
  // Carry the constant so that parent objective = sub objective + offset.
  if (instance.objective_constant() != 0.0) {
    red.sub = MipInstance(red.sub.name(), red.sub.original_sense(), red.sub.variables(),
                          red.sub.objective(), red.sub.rows(), instance.objective_constant());
  }
  red.stats.greedy_fixes = initial.size();
  red.stats.logical_fixes = red.fixed.size() - initial.size();
  red.stats.removed_rows = static_cast<int>(red.removed_rows.size());
  red.stats.free_vars = red.sub.num_vars();
  red.stats.remaining_rows = red.sub.num_rows();
  red.stats.sweeps = sweeps;
  return red;
}

}  // namespace bprb
