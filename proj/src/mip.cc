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

#include "bprb/mip.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "bprb/error.h"

namespace bprb {
namespace {

void CheckName(const std::string& name) {
  if (name.empty()) throw InvalidParameterError("instance name is empty");
  for (char ch : name) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      throw InvalidParameterError("instance name contains whitespace: '" +
                                  name + "'");
    }
  }
}

void CheckVariable(const Variable& var, int j) {
  const std::string where = "variable " + std::to_string(j);
  switch (var.kind) {
    case VarKind::kBinary:
      if (var.lower != 0.0 || var.upper != 1.0) {
        throw InvalidParameterError(where + ": binary bounds must be [0,1]");
      }
      break;
    case VarKind::kInteger:
      if (!std::isfinite(var.lower) || !std::isfinite(var.upper)) {
        throw UnboundedDomainError(where + ": integer bounds must be finite");
      }
      if (var.lower != std::floor(var.lower) ||
          var.upper != std::floor(var.upper) || var.lower > var.upper) {
        throw InvalidParameterError(where +
                                    ": integer bounds must be integral with "
                                    "lower <= upper");
      }
      break;
    case VarKind::kContinuous:
      if (!std::isfinite(var.lower) || var.lower < 0.0 ||
          std::isnan(var.upper) || var.upper < var.lower) {
        throw InvalidParameterError(
            where + ": continuous bounds must satisfy 0 <= lower <= upper");
      }
      break;
  }
}

}  // namespace

MipInstance::MipInstance(std::string name, Sense original_sense,
                         std::vector<Variable> variables,
                         std::vector<double> objective, std::vector<Row> rows,
                         double objective_constant)
    : name_(std::move(name)),
      original_sense_(original_sense),
      variables_(std::move(variables)),
      objective_(std::move(objective)),
      rows_(std::move(rows)),
      objective_constant_(objective_constant) {
  CheckName(name_);
  const int n = num_vars();
  if (static_cast<int>(objective_.size()) != n) {
    throw DimensionError("objective has " + std::to_string(objective_.size()) +
                         " entries for " + std::to_string(n) + " variables");
  }
  for (int j = 0; j < n; ++j) {
    CheckVariable(variables_[j], j);
    if (!std::isfinite(objective_[j])) {
      throw InvalidParameterError("objective coefficient " + std::to_string(j) +
                                  " is not finite");
    }
  }
  if (!std::isfinite(objective_constant_)) {
    throw InvalidParameterError("objective constant is not finite");
  }
  for (int i = 0; i < num_rows(); ++i) {
    Row& row = rows_[i];
    if (!std::isfinite(row.rhs)) {
      throw InvalidParameterError("row " + std::to_string(i) +
                                  ": rhs is not finite");
    }
    std::sort(row.entries.begin(), row.entries.end(),
              [](const RowEntry& a, const RowEntry& b) { return a.var < b.var; });
    for (size_t k = 0; k < row.entries.size(); ++k) {
      const RowEntry& e = row.entries[k];
      if (e.var < 0 || e.var >= n) {
        throw IndexError("row " + std::to_string(i) + ": variable index " +
                         std::to_string(e.var) + " out of range");
      }
      if (e.coef == 0.0 || !std::isfinite(e.coef)) {
        throw InvalidParameterError("row " + std::to_string(i) +
                                    ": coefficient must be finite and nonzero");
      }
      if (k > 0 && row.entries[k - 1].var == e.var) {
        throw InvalidParameterError("row " + std::to_string(i) +
                                    ": duplicate variable " +
                                    std::to_string(e.var));
      }
    }
  }
}

MipInstance MipInstance::Binary(std::string name, Sense original_sense,
                                std::vector<double> objective,
                                std::vector<Row> rows) {
  std::vector<Variable> vars(objective.size(), Variable::Binary());
  return MipInstance(std::move(name), original_sense, std::move(vars),
                     std::move(objective), std::move(rows));
}

int64_t MipInstance::num_nonzeros() const {
  int64_t nnz = 0;
  for (const Row& row : rows_) nnz += static_cast<int64_t>(row.entries.size());
  return nnz;
}

bool MipInstance::IsPureBinary() const {
  return std::all_of(variables_.begin(), variables_.end(), [](const Variable& v) {
    return v.kind == VarKind::kBinary;
  });
}

Assignment Assignment::FromValues(std::span<const int> values) {
  Assignment x(static_cast<int>(values.size()));
  for (size_t j = 0; j < values.size(); ++j) x.Set(static_cast<int>(j), values[j]);
  return x;
}

void Assignment::Set(int j, int value) {
  if (j < 0 || j >= size()) {
    throw IndexError("assignment index " + std::to_string(j) + " out of range");
  }
  if (value != 0 && value != 1) {
    throw InvalidParameterError("assignment values must be 0 or 1");
  }
  values_[j] = static_cast<int8_t>(value);
}

bool Assignment::IsTotal() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](int8_t v) { return v == kUnassigned; });
}

std::vector<int> Assignment::ToVector() const {
  return std::vector<int>(values_.begin(), values_.end());
}

EvalResult Evaluate(const MipInstance& instance, const Assignment& x) {
  if (!instance.IsPureBinary()) {
    throw UnsupportedInstanceError("Evaluate requires a pure binary instance");
  }
  if (x.size() != instance.num_vars()) {
    throw IncompleteAssignmentError(
        "assignment covers " + std::to_string(x.size()) + " of " +
        std::to_string(instance.num_vars()) + " variables");
  }
  EvalResult result;
  result.objective = instance.objective_constant();
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (!x.IsSet(j)) {
      throw IncompleteAssignmentError("variable " + std::to_string(j) +
                                      " is unassigned");
    }
    if (x.value(j) == 1) result.objective += instance.objective()[j];
  }
  for (int i = 0; i < instance.num_rows(); ++i) {
    const Row& row = instance.row(i);
    double lhs = 0.0;
    for (const RowEntry& e : row.entries) {
      if (x.value(e.var) == 1) lhs += e.coef;
    }
    if (lhs > row.rhs + kFeasibilityTolerance) {
      result.violated_rows.emplace_back(i, lhs);
    }
  }
  result.feasible = result.violated_rows.empty();
  return result;
}

MipInstance BinarizeIntegerVar(const MipInstance& instance, int j) {
  if (j < 0 || j >= instance.num_vars()) {
    throw IndexError("variable index " + std::to_string(j) + " out of range");
  }
  const Variable& var = instance.variable(j);
  if (var.kind == VarKind::kContinuous) {
    throw InvalidParameterError("variable " + std::to_string(j) +
                                " is continuous");
  }
  if (!std::isfinite(var.lower) || !std::isfinite(var.upper)) {
    throw UnboundedDomainError("variable " + std::to_string(j) +
                               " has an unbounded domain");
  }
  const double range = var.upper - var.lower;  // l - 1
  int m = 0;
  while (std::ldexp(1.0, m) < range + 1.0) ++m;  // m = ceil(log2(l))
  const double lower = var.lower;

  // New index of old variable k (k != j).
  auto remap = [&](int k) { return k < j ? k : k + m - 1; };

  std::vector<Variable> vars;
  std::vector<double> objective;
  vars.reserve(instance.num_vars() + m);
  for (int k = 0; k < instance.num_vars(); ++k) {
    if (k == j) {
      for (int p = 0; p < m; ++p) {
        vars.push_back(Variable::Binary());
        objective.push_back(instance.objective()[j] * std::ldexp(1.0, p));
      }
    } else {
      vars.push_back(instance.variable(k));
      objective.push_back(instance.objective()[k]);
    }
  }
  const double constant =
      instance.objective_constant() + instance.objective()[j] * lower;

  std::vector<Row> rows;
  rows.reserve(instance.num_rows() + 1);
  for (const Row& row : instance.rows()) {
    Row out;
    out.rhs = row.rhs;
    for (const RowEntry& e : row.entries) {
      if (e.var == j) {
        out.rhs -= e.coef * lower;
        for (int p = 0; p < m; ++p) {
          out.entries.push_back({j + p, e.coef * std::ldexp(1.0, p)});
        }
      } else {
        out.entries.push_back({remap(e.var), e.coef});
      }
    }
    rows.push_back(std::move(out));
  }
  if (std::ldexp(1.0, m) - 1.0 > range) {
    Row bound;
    bound.rhs = range;
    for (int p = 0; p < m; ++p) bound.entries.push_back({j + p, std::ldexp(1.0, p)});
    rows.push_back(std::move(bound));
  }
  return MipInstance(instance.name(), instance.original_sense(), std::move(vars),
                     std::move(objective), std::move(rows), constant);
}

MipInstance BinarizeAll(const MipInstance& instance) {
  MipInstance out = instance;
  // Walk from the back so earlier indices stay valid.
  for (int j = instance.num_vars() - 1; j >= 0; --j) {
    if (instance.variable(j).kind == VarKind::kInteger) {
      out = BinarizeIntegerVar(out, j);
    }
  }
  return out;
}

std::vector<Row> NormalizeConstraints(std::span<const RelationalRow> rows) {
  std::vector<Row> out;
  out.reserve(rows.size());
  auto negated = [](const RelationalRow& r) {
    Row row;
    row.rhs = -r.rhs;
    row.entries.reserve(r.entries.size());
    for (const RowEntry& e : r.entries) row.entries.push_back({e.var, -e.coef});
    return row;
  };
  for (const RelationalRow& r : rows) {
    switch (r.relation) {
      case Relation::kLessEqual:
        out.push_back(Row{r.entries, r.rhs});
        break;
      case Relation::kGreaterEqual:
        out.push_back(negated(r));
        break;
      case Relation::kEqual:
        out.push_back(Row{r.entries, r.rhs});
        out.push_back(negated(r));
        break;
    }
  }
  return out;
}

}  // namespace bprb
