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

#ifndef BPRB_MIP_H_
#define BPRB_MIP_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bprb {

// Absolute tolerance used for every row feasibility test.
inline constexpr double kFeasibilityTolerance = 1e-9;

enum class VarKind { kBinary, kInteger, kContinuous };

enum class Sense { kMinimize, kMaximize };

struct Variable {
  VarKind kind = VarKind::kBinary;
  // Binary variables always carry [0, 1]. Continuous upper bounds may be
  // +infinity.
  double lower = 0.0;
  double upper = 1.0;

  static Variable Binary() { return {}; }
  static Variable Integer(double lower, double upper) {
    return {VarKind::kInteger, lower, upper};
  }
  static Variable Continuous(double lower, double upper) {
    return {VarKind::kContinuous, lower, upper};
  }
  bool operator==(const Variable&) const = default;
};

struct RowEntry {
  int var = 0;
  double coef = 0.0;
  bool operator==(const RowEntry&) const = default;
};

// A single constraint sum_j coef_j * x_j <= rhs.
struct Row {
  std::vector<RowEntry> entries;
  double rhs = 0.0;
  bool operator==(const Row&) const = default;
};

// A minimization program  min c'x + constant  s.t. Ax <= b  over binary,
// bounded integer and continuous variables.
//
// The objective is always stored in minimization sense. An instance built
// from a maximization problem keeps `original_sense() == kMaximize` and its
// coefficients negated; use ToOriginalSense() when reporting.
//
// Instances are immutable once constructed. The constructor sorts row
// entries by variable index and rejects duplicate indices, zero or
// non-finite coefficients and invalid bounds.
class MipInstance {
 public:
  MipInstance() = default;
  MipInstance(std::string name, Sense original_sense,
              std::vector<Variable> variables, std::vector<double> objective,
              std::vector<Row> rows, double objective_constant = 0.0);

  // Convenience for pure binary programs.
  static MipInstance Binary(std::string name, Sense original_sense,
                            std::vector<double> objective,
                            std::vector<Row> rows);

  const std::string& name() const { return name_; }
  Sense original_sense() const { return original_sense_; }
  int num_vars() const { return static_cast<int>(variables_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int j) const { return variables_[j]; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(int i) const { return rows_[i]; }
  int64_t num_nonzeros() const;

  bool IsPureBinary() const;

  // Converts an internal (minimization) objective value to the sense the
  // problem was posed in.
  double ToOriginalSense(double internal_objective) const {
    return original_sense_ == Sense::kMaximize ? -internal_objective
                                               : internal_objective;
  }

  bool operator==(const MipInstance&) const = default;

 private:
  std::string name_ = "unnamed";
  Sense original_sense_ = Sense::kMinimize;
  std::vector<Variable> variables_;
  std::vector<double> objective_;
  std::vector<Row> rows_;
  double objective_constant_ = 0.0;
};

// Partial or total 0/1 assignment of the variables of an instance.
class Assignment {
 public:
  static constexpr int8_t kUnassigned = -1;

  Assignment() = default;
  explicit Assignment(int num_vars) : values_(num_vars, kUnassigned) {}
  static Assignment FromValues(std::span<const int> values);

  int size() const { return static_cast<int>(values_.size()); }
  bool IsSet(int j) const { return values_[j] != kUnassigned; }
  int value(int j) const { return values_[j]; }
  void Set(int j, int value);
  void Clear(int j) { values_[j] = kUnassigned; }
  bool IsTotal() const;
  std::vector<int> ToVector() const;

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<int8_t> values_;
};

struct EvalResult {
  bool feasible = true;
  // c'x + objective constant, minimization sense.
  double objective = 0.0;
  // (row index, lhs value) for every row with lhs > rhs + tolerance.
  std::vector<std::pair<int, double>> violated_rows;
};

// Scores a total assignment of a pure binary instance.
EvalResult Evaluate(const MipInstance& instance, const Assignment& x);

// Replaces bounded integer variable `j` by m = ceil(log2(upper - lower + 1))
// binaries placed at indices j .. j+m-1 (weight 2^p at index j+p). The lower
// bound is folded into the right-hand sides and the objective constant. When
// 2^m - 1 exceeds upper - lower, an extra row bounding the expansion is
// appended.
MipInstance BinarizeIntegerVar(const MipInstance& instance, int j);

// Binarizes every general integer variable of the instance.
MipInstance BinarizeAll(const MipInstance& instance);

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct RelationalRow {
  std::vector<RowEntry> entries;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// Rewrites >= rows as negated <= rows and splits = rows into a <= pair,
// keeping the input order.
std::vector<Row> NormalizeConstraints(std::span<const RelationalRow> rows);

}  // namespace bprb

#endif  // BPRB_MIP_H_
