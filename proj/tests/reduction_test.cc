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

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <variant>
#include <vector>

#include "bprb/error.h"
#include "bprb/mip.h"
#include "oracles.h"

namespace bprb {
namespace {

using testing::CheckLocalRules;
using testing::CheckReductionSoundness;
using testing::RandomBinaryInstance;
using testing::RandomFixing;

Row MakeRow(std::vector<RowEntry> entries, double rhs) { return Row{std::move(entries), rhs}; }

FixedSet Fixes(const std::map<int, int>& values) {
  FixedSet out;
  for (const auto& [var, value] : values) out.Add(var, value, FixSource::kGreedy);
  return out;
}

TEST(SelectFixSetTest, ZeroEtaFixesNothing) {
  std::vector<double> p = {0.9, 0.1, 0.7};
  EXPECT_TRUE(SelectFixSet(p, 0.0).empty());
}

TEST(SelectFixSetTest, PicksMostConfident) {
  std::vector<double> p = {0.9, 0.2, 0.55};
  FixedSet fixed = SelectFixSet(p, 0.34);
  ASSERT_EQ(fixed.size(), 1);
  EXPECT_TRUE(fixed.Contains(0));
  EXPECT_EQ(fixed.Value(0), 1);
}

TEST(SelectFixSetTest, TieBreaksByIndexAndRoundsHalfUp) {
  std::vector<double> p = {0.5, 0.5};
  FixedSet fixed = SelectFixSet(p, 0.5);
  ASSERT_EQ(fixed.size(), 1);
  EXPECT_TRUE(fixed.Contains(0));
  EXPECT_EQ(fixed.Value(0), 1);
}

TEST(SelectFixSetTest, ValuesFollowRounding) {
  std::vector<double> p = {0.05, 0.97, 0.4, 0.6, 0.5};
  FixedSet fixed = SelectFixSet(p, 0.8);
  ASSERT_EQ(fixed.size(), 4);
  EXPECT_EQ(fixed.Value(0), 0);
  EXPECT_EQ(fixed.Value(1), 1);
  EXPECT_EQ(fixed.Value(2), 0);
  EXPECT_EQ(fixed.Value(3), 1);
  EXPECT_FALSE(fixed.Contains(4));
}

TEST(SelectFixSetTest, RejectsEtaOutOfRange) {
  std::vector<double> p = {0.5};
  EXPECT_THROW(SelectFixSet(p, 1.0), InvalidParameterError);
  EXPECT_THROW(SelectFixSet(p, -0.1), InvalidParameterError);
}

TEST(FixedSetTest, RefusesOppositeValue) {
  FixedSet fixed;
  EXPECT_TRUE(fixed.Add(2, 1, FixSource::kGreedy));
  EXPECT_TRUE(fixed.Add(2, 1, FixSource::kLogicalOne));
  EXPECT_FALSE(fixed.Add(2, 0, FixSource::kLogicalZero));
  EXPECT_EQ(fixed.Value(2), 1);
  EXPECT_EQ(fixed.CountSource(FixSource::kGreedy), 1);
}

TEST(ApplyFixingTest, FoldsFixedColumns) {
  MipInstance inst = MipInstance::Binary("t", Sense::kMinimize, {3.0, -1.0},
                                         {MakeRow({{0, 1.0}, {1, 1.0}}, 1.0)});
  FoldedSystem folded = ApplyFixing(inst, Fixes({{0, 1}}));
  ASSERT_EQ(folded.rows.size(), 1u);
  EXPECT_EQ(folded.rows[0], MakeRow({{1, 1.0}}, 0.0));
  EXPECT_DOUBLE_EQ(folded.objective_offset, 3.0);
}

TEST(ApplyFixingTest, NothingFixedIsIdentity) {
  std::mt19937_64 rng(3);
  MipInstance inst = RandomBinaryInstance(rng, 6, 4);
  FoldedSystem folded = ApplyFixing(inst, FixedSet{});
  EXPECT_EQ(folded.rows, inst.rows());
  EXPECT_EQ(folded.objective_offset, 0.0);
}

TEST(ApplyFixingTest, RejectsBadIndex) {
  MipInstance inst = MipInstance::Binary("t", Sense::kMinimize, {1.0}, {});
  EXPECT_THROW(ApplyFixing(inst, Fixes({{4, 1}})), IndexError);
}

TEST(DetectRedundantTest, Examples) {
  EXPECT_TRUE(DetectRedundant(MakeRow({{1, 1.0}}, 2.0)));
  EXPECT_TRUE(DetectRedundant(MakeRow({{1, -1.0}}, 0.0)));
  EXPECT_FALSE(DetectRedundant(MakeRow({{1, 1.0}, {2, 1.0}}, 1.0)));
  EXPECT_TRUE(DetectRedundant(MakeRow({}, 0.0)));
}

TEST(LogicalFixTest, Examples) {
  using Forced = std::vector<std::pair<int, int>>;
  EXPECT_EQ(LogicalFix(MakeRow({{0, 2.0}, {1, 1.0}, {2, -1.0}}, 0.0)), (Forced{{0, 0}}));
  // x1 = 1 is forced, and x2 = 1 would leave -2 x1 <= -3.
  EXPECT_EQ(LogicalFix(MakeRow({{0, -2.0}, {1, 1.0}}, -2.0)), (Forced{{0, 1}, {1, 0}}));
  EXPECT_TRUE(LogicalFix(MakeRow({{0, 1.0}, {1, 1.0}}, 2.0)).empty());
}

TEST(ReduceToFixpointTest, SlackSystemUnchanged) {
  MipInstance inst = MipInstance::Binary(
      "slack", Sense::kMinimize, {1.0, 2.0, 3.0},
      {MakeRow({{0, 1.0}, {1, 1.0}}, 1.0), MakeRow({{1, 1.0}, {2, 1.0}}, 1.0)});
  ReductionOutcome out = ReduceToFixpoint(inst, FixedSet{});
  ASSERT_TRUE(std::holds_alternative<ReducedInstance>(out));
  const ReducedInstance& red = std::get<ReducedInstance>(out);
  EXPECT_EQ(red.sub.num_vars(), 3);
  EXPECT_EQ(red.sub.rows(), inst.rows());
  EXPECT_EQ(red.sub.objective(), inst.objective());
  EXPECT_TRUE(red.removed_rows.empty());
  EXPECT_EQ(red.stats.free_vars, 3);
}

TEST(ReduceToFixpointTest, ReportsConflict) {
  MipInstance inst = MipInstance::Binary(
      "conflict", Sense::kMinimize, {0.0, 0.0, 0.0},
      {MakeRow({{0, 1.0}, {1, 1.0}}, 1.0), MakeRow({{1, -1.0}, {2, -1.0}}, -2.0)});
  ReductionOutcome out = ReduceToFixpoint(inst, Fixes({{0, 1}}));
  EXPECT_TRUE(std::holds_alternative<Conflict>(out));
  EXPECT_EQ(CheckReductionSoundness(inst, {{0, 1}}), "");
}

TEST(ReduceToFixpointTest, PathCascade) {
  // Covering rows on a path: x_t + x_{t+1} >= 1.
  const int n = 7;
  std::vector<Row> rows;
  for (int t = 0; t + 1 < n; ++t) rows.push_back(MakeRow({{t, -1.0}, {t + 1, -1.0}}, -1.0));
  MipInstance inst =
      MipInstance::Binary("path", Sense::kMinimize, std::vector<double>(n, 1.0), rows);
  ReductionOutcome out = ReduceToFixpoint(inst, Fixes({{0, 0}}));
  ASSERT_TRUE(std::holds_alternative<ReducedInstance>(out));
  const ReducedInstance& red = std::get<ReducedInstance>(out);
  EXPECT_EQ(red.fixed.Value(1), 1);
  EXPECT_EQ(red.fixed.CountSource(FixSource::kLogicalOne), 1);
  EXPECT_EQ(red.sub.num_vars(), n - 2);
  EXPECT_EQ(red.stats.removed_rows, 2);
  EXPECT_EQ(CheckReductionSoundness(inst, {{0, 0}}), "");
}

TEST(ReduceToFixpointTest, FullPathCascadeAlternates) {
  // Equalities x_t + x_{t+1} == 1 force an alternating pattern.
  const int n = 8;
  std::vector<Row> rows;
  for (int t = 0; t + 1 < n; ++t) {
    rows.push_back(MakeRow({{t, -1.0}, {t + 1, -1.0}}, -1.0));
    rows.push_back(MakeRow({{t, 1.0}, {t + 1, 1.0}}, 1.0));
  }
  MipInstance inst =
      MipInstance::Binary("alt", Sense::kMinimize, std::vector<double>(n, 1.0), rows);
  ReductionOutcome out = ReduceToFixpoint(inst, Fixes({{0, 0}}));
  ASSERT_TRUE(std::holds_alternative<ReducedInstance>(out));
  const ReducedInstance& red = std::get<ReducedInstance>(out);
  EXPECT_EQ(red.sub.num_vars(), 0);
  for (int t = 0; t < n; ++t) EXPECT_EQ(red.fixed.Value(t), t % 2) << t;
  EXPECT_LE(red.stats.sweeps, n + 1);
  EXPECT_EQ(CheckReductionSoundness(inst, {{0, 0}}), "");
}

TEST(ReduceToFixpointTest, RejectsBadIndex) {
  MipInstance inst = MipInstance::Binary("t", Sense::kMinimize, {1.0}, {});
  EXPECT_THROW(ReduceToFixpoint(inst, Fixes({{1, 0}})), IndexError);
}

TEST(ReduceToFixpointTest, LiftRestoresParentIndexing) {
  MipInstance inst = MipInstance::Binary(
      "lift", Sense::kMinimize, {1.0, -2.0, 3.0, 4.0},
      {MakeRow({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 2.0)});
  ReductionOutcome out = ReduceToFixpoint(inst, Fixes({{1, 1}, {2, 0}}));
  ASSERT_TRUE(std::holds_alternative<ReducedInstance>(out));
  const ReducedInstance& red = std::get<ReducedInstance>(out);
  ASSERT_EQ(red.sub_to_parent, (std::vector<int>{0, 3}));
  EXPECT_EQ(red.parent_to_sub, (std::vector<int>{0, -1, -1, 1}));
  const std::vector<int> sub_values = {1, 0};
  Assignment lifted = red.Lift(Assignment::FromValues(sub_values));
  EXPECT_EQ(lifted.ToVector(), (std::vector<int>{1, 1, 0, 0}));
  EXPECT_DOUBLE_EQ(red.objective_offset, -2.0);
}

TEST(ReductionSoundnessTest, RandomInstancesAgreeWithEnumeration) {
  std::mt19937_64 rng(20240611);
  int conflicts = 0;
  int reduced = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const int m = 1 + static_cast<int>(rng() % 8);
    MipInstance inst = RandomBinaryInstance(rng, n, m);
    std::uniform_real_distribution<double> share(0.0, 0.7);
    std::map<int, int> fixed = RandomFixing(rng, n, share(rng));
    ASSERT_EQ(CheckReductionSoundness(inst, fixed), "") << "trial " << trial;
    ASSERT_EQ(CheckLocalRules(inst, fixed), "") << "trial " << trial;
    if (std::holds_alternative<Conflict>(ReduceToFixpoint(inst, Fixes(fixed)))) {
      ++conflicts;
    } else {
      ++reduced;
    }
  }
  EXPECT_GT(conflicts, 0);
  EXPECT_GT(reduced, 0);
}

TEST(ReductionSoundnessTest, ApplyFixingPreservesCompletionsUpToTwelve) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    MipInstance inst = RandomBinaryInstance(rng, 12, 6, 0.4);
    std::map<int, int> fixed = RandomFixing(rng, 12, 0.3);
    ASSERT_EQ(CheckLocalRules(inst, fixed), "") << "trial " << trial;
  }
}

TEST(ReductionPropertyTest, IdempotentOnOwnOutput) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    MipInstance inst = RandomBinaryInstance(rng, 10, 6);
    ReductionOutcome out = ReduceToFixpoint(inst, Fixes(RandomFixing(rng, 10, 0.1)));
    if (!std::holds_alternative<ReducedInstance>(out)) continue;
    const ReducedInstance& red = std::get<ReducedInstance>(out);
    ReductionOutcome again = ReduceToFixpoint(red.sub, FixedSet{});
    ASSERT_TRUE(std::holds_alternative<ReducedInstance>(again)) << trial;
    const ReducedInstance& red2 = std::get<ReducedInstance>(again);
    EXPECT_EQ(red2.sub.rows(), red.sub.rows()) << trial;
    EXPECT_EQ(red2.sub.num_vars(), red.sub.num_vars()) << trial;
    EXPECT_TRUE(red2.fixed.empty()) << trial;
    EXPECT_TRUE(red2.removed_rows.empty()) << trial;
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(ReductionPropertyTest, FreeCountNonIncreasingInEta) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    MipInstance inst = RandomBinaryInstance(rng, 12, 5);
    std::vector<double> p(12);
    for (double& v : p) v = unit(rng);
    int previous = 13;
    for (double eta : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      ReductionOutcome out = ReduceToFixpoint(inst, SelectFixSet(p, eta));
      if (!std::holds_alternative<ReducedInstance>(out)) break;
      const int free = std::get<ReducedInstance>(out).stats.free_vars;
      EXPECT_LE(free, previous) << "trial " << trial << " eta " << eta;
      previous = free;
    }
  }
}

TEST(ReductionPropertyTest, TerminatesWithinSweepBound) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 12);
    MipInstance inst = RandomBinaryInstance(rng, n, 2 + static_cast<int>(rng() % 10));
    ReductionOutcome out = ReduceToFixpoint(inst, Fixes(RandomFixing(rng, n, 0.2)));
    if (const auto* red = std::get_if<ReducedInstance>(&out)) {
      EXPECT_LE(red->stats.sweeps, n + 1);
      EXPECT_EQ(red->stats.free_vars + red->fixed.size(), n);
      EXPECT_EQ(red->stats.remaining_rows + red->stats.removed_rows, inst.num_rows());
    }
  }
}

}  // namespace
}  // namespace bprb
