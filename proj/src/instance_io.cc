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

#include "bprb/instance_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bprb/error.h"

namespace bprb {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
      ++pos;
    }
    if (pos >= line.size()) break;
    size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) {
      ++end;
    }
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

// Calls fn(line_number, fields) for every non-empty, non-comment line.
template <typename Fn>
void ForEachLine(std::string_view text, char comment, Fn&& fn) {
  int line_number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_number;
    auto fields = SplitFields(line);
    if (!fields.empty() && fields[0][0] != comment) fn(line_number, line, fields);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

double ParseNumber(std::string_view token, int line) {
  double value = 0.0;
  std::string_view body = token;
  if (!body.empty() && body[0] == '+') body.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size() || std::isnan(value)) {
    throw ParseError("invalid number '" + std::string(token) + "'", line);
  }
  return value;
}

int ParseIndex(std::string_view token, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
    throw ParseError("invalid index '" + std::string(token) + "'", line);
  }
  return value;
}

void ExpectFields(const std::vector<std::string_view>& fields, size_t count,
                  int line) {
  if (fields.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " fields for '" +
                         std::string(fields[0]) + "', found " +
                         std::to_string(fields.size()),
                     line);
  }
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

MipInstance ParseInstance(std::string_view text) {
  bool have_header = false;
  std::string name;
  Sense sense = Sense::kMinimize;
  int n_vars = 0;
  int n_cons = 0;
  std::vector<std::optional<Variable>> vars;
  std::vector<double> objective;
  std::vector<bool> obj_seen;
  std::vector<std::optional<Row>> rows;
  double constant = 0.0;
  bool constant_seen = false;
  int current_row = -1;
  std::set<int> current_row_vars;
  int last_line = 0;

  ForEachLine(text, '#', [&](int line, std::string_view,
                             const std::vector<std::string_view>& f) {
    last_line = line;
    if (!have_header) {
      if (f[0] != "bpmip") throw ParseError("missing 'bpmip' header", line);
      ExpectFields(f, 6, line);
      if (f[1] != "1") {
        throw ParseError("unsupported format version '" + std::string(f[1]) + "'",
                         line);
      }
      name = std::string(f[2]);
      if (f[3] == "min") {
        sense = Sense::kMinimize;
      } else if (f[3] == "max") {
        sense = Sense::kMaximize;
      } else {
        throw ParseError("sense must be 'min' or 'max'", line);
      }
      n_vars = ParseIndex(f[4], line);
      n_cons = ParseIndex(f[5], line);
      vars.assign(n_vars, std::nullopt);
      objective.assign(n_vars, 0.0);
      obj_seen.assign(n_vars, false);
      rows.assign(n_cons, std::nullopt);
      have_header = true;
      return;
    }
    auto var_index = [&](std::string_view token) {
      int j = ParseIndex(token, line);
      if (j >= n_vars) {
        throw ParseError("variable index " + std::to_string(j) +
                             " out of range (n_vars = " + std::to_string(n_vars) +
                             ")",
                         line);
      }
      return j;
    };
    const std::string_view tag = f[0];
    if (tag == "var") {
      if (f.size() < 3) throw ParseError("truncated 'var' line", line);
      int j = var_index(f[1]);
      if (vars[j]) throw ParseError("duplicate var " + std::to_string(j), line);
      Variable v;
      if (f[2] == "bin") {
        ExpectFields(f, 3, line);
        v = Variable::Binary();
      } else if (f[2] == "int" || f[2] == "cont") {
        ExpectFields(f, 5, line);
        v.kind = f[2] == "int" ? VarKind::kInteger : VarKind::kContinuous;
        v.lower = ParseNumber(f[3], line);
        v.upper = ParseNumber(f[4], line);
        if (v.lower > v.upper) throw ParseError("lower bound exceeds upper", line);
        if (v.kind == VarKind::kInteger &&
            (!std::isfinite(v.lower) || !std::isfinite(v.upper))) {
          throw ParseError("integer variable needs finite bounds", line);
        }
        if (v.kind == VarKind::kContinuous && (v.lower < 0 || !std::isfinite(v.lower))) {
          throw ParseError("continuous lower bound must be finite and >= 0", line);
        }
      } else {
        throw ParseError("unknown variable kind '" + std::string(f[2]) + "'", line);
      }
      vars[j] = v;
    } else if (tag == "const") {
      ExpectFields(f, 2, line);
      if (constant_seen) throw ParseError("duplicate 'const' line", line);
      constant_seen = true;
      constant = ParseNumber(f[1], line);
    } else if (tag == "obj") {
      ExpectFields(f, 3, line);
      int j = var_index(f[1]);
      if (obj_seen[j]) throw ParseError("duplicate obj entry " + std::to_string(j), line);
      obj_seen[j] = true;
      objective[j] = ParseNumber(f[2], line);
      if (objective[j] == 0.0 || !std::isfinite(objective[j])) {
        throw ParseError("objective coefficient must be finite and nonzero", line);
      }
    } else if (tag == "row") {
      ExpectFields(f, 3, line);
      int i = ParseIndex(f[1], line);
      if (i >= n_cons) {
        throw ParseError("row index " + std::to_string(i) +
                             " out of range (n_cons = " + std::to_string(n_cons) +
                             ")",
                         line);
      }
      if (rows[i]) throw ParseError("duplicate row " + std::to_string(i), line);
      Row row;
      row.rhs = ParseNumber(f[2], line);
      if (!std::isfinite(row.rhs)) throw ParseError("rhs must be finite", line);
      rows[i] = std::move(row);
      current_row = i;
      current_row_vars.clear();
    } else if (tag == "e") {
      ExpectFields(f, 3, line);
      if (current_row < 0) throw ParseError("'e' entry before any 'row'", line);
      int j = var_index(f[1]);
      if (!current_row_vars.insert(j).second) {
        throw ParseError("duplicate entry for variable " + std::to_string(j) +
                             " in row " + std::to_string(current_row),
                         line);
      }
      double coef = ParseNumber(f[2], line);
      if (coef == 0.0 || !std::isfinite(coef)) {
        throw ParseError("row coefficient must be finite and nonzero", line);
      }
      rows[current_row]->entries.push_back({j, coef});
    } else {
      throw ParseError("unknown record '" + std::string(tag) + "'", line);
    }
  });

  if (!have_header) throw ParseError("empty document", last_line + 1);
  std::vector<Variable> variables(n_vars);
  for (int j = 0; j < n_vars; ++j) {
    if (!vars[j]) {
      throw ParseError("variable " + std::to_string(j) + " never declared",
                       last_line);
    }
    variables[j] = *vars[j];
  }
  std::vector<Row> final_rows(n_cons);
  for (int i = 0; i < n_cons; ++i) {
    if (!rows[i]) {
      throw ParseError("row " + std::to_string(i) + " never declared", last_line);
    }
    final_rows[i] = std::move(*rows[i]);
  }
  if (sense == Sense::kMaximize) {
    for (double& c : objective) c = -c;
    constant = -constant;
  }
  try {
    return MipInstance(std::move(name), sense, std::move(variables),
                       std::move(objective), std::move(final_rows), constant);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), last_line);
  }
}

std::string SerializeInstance(const MipInstance& instance) {
  std::ostringstream out;
  const bool maximize = instance.original_sense() == Sense::kMaximize;
  auto original = [&](double c) { return maximize ? -c : c; };
  out << "bpmip 1 " << instance.name() << ' ' << (maximize ? "max" : "min") << ' '
      << instance.num_vars() << ' ' << instance.num_rows() << '\n';
  for (int j = 0; j < instance.num_vars(); ++j) {
    const Variable& v = instance.variable(j);
    out << "var " << j;
    switch (v.kind) {
      case VarKind::kBinary:
        out << " bin";
        break;
      case VarKind::kInteger:
        out << " int " << FormatDouble(v.lower) << ' ' << FormatDouble(v.upper);
        break;
      case VarKind::kContinuous:
        out << " cont " << FormatDouble(v.lower) << ' ' << FormatDouble(v.upper);
        break;
    }
    out << '\n';
  }
  if (instance.objective_constant() != 0.0) {
    out << "const " << FormatDouble(original(instance.objective_constant())) << '\n';
  }
  for (int j = 0; j < instance.num_vars(); ++j) {
    const double c = instance.objective()[j];
    if (c != 0.0) out << "obj " << j << ' ' << FormatDouble(original(c)) << '\n';
  }
  for (int i = 0; i < instance.num_rows(); ++i) {
    const Row& row = instance.row(i);
    out << "row " << i << ' ' << FormatDouble(row.rhs) << '\n';
    for (const RowEntry& e : row.entries) {
      out << "e " << e.var << ' ' << FormatDouble(e.coef) << '\n';
    }
  }
  return out.str();
}

MipInstance ParseMps(std::string_view text) {
  enum class Section { kNone, kName, kObjSense, kRows, kColumns, kRhs, kBounds, kEnd };
  Section section = Section::kNone;
  std::string name = "mps";
  Sense sense = Sense::kMinimize;
  std::string objective_row;
  std::unordered_map<std::string, int> row_index;
  std::vector<RelationalRow> rows;
  std::unordered_map<std::string, int> col_index;
  std::vector<std::string> col_names;
  std::vector<bool> col_integer;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> bounded;
  std::set<std::string> ignored_free_rows;
  double rhs_objective = 0.0;
  bool in_integer_block = false;
  const double kInf = std::numeric_limits<double>::infinity();

  auto column = [&](std::string_view token, int line, bool create) -> int {
    auto it = col_index.find(std::string(token));
    if (it != col_index.end()) return it->second;
    if (!create) throw ParseError("unknown column '" + std::string(token) + "'", line);
    const int j = static_cast<int>(col_names.size());
    col_index.emplace(std::string(token), j);
    col_names.emplace_back(token);
    col_integer.push_back(in_integer_block);
    objective.push_back(0.0);
    lower.push_back(0.0);
    upper.push_back(in_integer_block ? 1.0 : kInf);
    bounded.push_back(false);
    return j;
  };

  ForEachLine(text, '*', [&](int line, std::string_view raw,
                             const std::vector<std::string_view>& f) {
    const bool header = !std::isspace(static_cast<unsigned char>(raw[0]));
    if (header) {
      const std::string_view key = f[0];
      if (key == "NAME") {
        section = Section::kName;
        if (f.size() > 1) name = std::string(f[1]);
        return;
      }
      if (key == "OBJSENSE") {
        section = Section::kObjSense;
        if (f.size() > 1) {
          sense = f[1] == "MAX" || f[1] == "MAXIMIZE" ? Sense::kMaximize : Sense::kMinimize;
        }
        return;
      }
      if (key == "ROWS") { section = Section::kRows; return; }
      if (key == "COLUMNS") { section = Section::kColumns; return; }
      if (key == "RHS") { section = Section::kRhs; return; }
      if (key == "BOUNDS") { section = Section::kBounds; return; }
      if (key == "ENDATA") { section = Section::kEnd; return; }
      if (key == "RANGES") throw ParseError("RANGES section is not supported", line);
      throw ParseError("unknown section '" + std::string(key) + "'", line);
    }
    switch (section) {
      case Section::kObjSense:
        if (f[0] == "MAX" || f[0] == "MAXIMIZE") {
          sense = Sense::kMaximize;
        } else if (f[0] == "MIN" || f[0] == "MINIMIZE") {
          sense = Sense::kMinimize;
        } else {
          throw ParseError("unknown objective sense '" + std::string(f[0]) + "'", line);
        }
        return;
      case Section::kRows: {
        ExpectFields(f, 2, line);
        const std::string row_name(f[1]);
        if (row_index.count(row_name) || row_name == objective_row ||
            ignored_free_rows.count(row_name)) {
          throw ParseError("duplicate row '" + row_name + "'", line);
        }
        if (f[0] == "N") {
          if (objective_row.empty()) {
            objective_row = row_name;
          } else {
            ignored_free_rows.insert(row_name);
          }
          return;
        }
        RelationalRow row;
        if (f[0] == "L") {
          row.relation = Relation::kLessEqual;
        } else if (f[0] == "G") {
          row.relation = Relation::kGreaterEqual;
        } else if (f[0] == "E") {
          row.relation = Relation::kEqual;
        } else {
          throw ParseError("unknown row type '" + std::string(f[0]) + "'", line);
        }
        row_index.emplace(row_name, static_cast<int>(rows.size()));
        rows.push_back(std::move(row));
        return;
      }
      case Section::kColumns: {
        if (f.size() >= 3 && f[1] == "'MARKER'") {
          if (f[2] == "'INTORG'") {
            in_integer_block = true;
          } else if (f[2] == "'INTEND'") {
            in_integer_block = false;
          } else {
            throw ParseError("unknown marker " + std::string(f[2]), line);
          }
          return;
        }
        if (f.size() != 3 && f.size() != 5) {
          throw ParseError("COLUMNS line needs 3 or 5 fields", line);
        }
        const int j = column(f[0], line, /*create=*/true);
        for (size_t k = 1; k + 1 < f.size(); k += 2) {
          const std::string row_name(f[k]);
          const double value = ParseNumber(f[k + 1], line);
          if (row_name == objective_row) {
            objective[j] = value;
          } else if (ignored_free_rows.count(row_name)) {
            continue;
          } else {
            auto it = row_index.find(row_name);
            if (it == row_index.end()) {
              throw ParseError("unknown row '" + row_name + "'", line);
            }
            if (value == 0.0) continue;
            auto& entries = rows[it->second].entries;
            for (const RowEntry& e : entries) {
              if (e.var == j) {
                throw ParseError("duplicate entry for column '" + std::string(f[0]) +
                                     "' in row '" + row_name + "'",
                                 line);
              }
            }
            entries.push_back({j, value});
          }
        }
        return;
      }
      case Section::kRhs: {
        if (f.size() != 3 && f.size() != 5) {
          throw ParseError("RHS line needs 3 or 5 fields", line);
        }
        for (size_t k = 1; k + 1 < f.size(); k += 2) {
          const std::string row_name(f[k]);
          const double value = ParseNumber(f[k + 1], line);
          if (row_name == objective_row) {
            rhs_objective = value;
            continue;
          }
          auto it = row_index.find(row_name);
          if (it == row_index.end()) {
            throw ParseError("unknown row '" + row_name + "'", line);
          }
          rows[it->second].rhs = value;
        }
        return;
      }
      case Section::kBounds: {
        if (f.size() < 3) throw ParseError("truncated BOUNDS line", line);
        const std::string_view type = f[0];
        const int j = column(f[2], line, /*create=*/false);
        if (type == "BV") {
          col_integer[j] = true;
          lower[j] = 0.0;
          upper[j] = 1.0;
          bounded[j] = true;
          return;
        }
        if (type == "PL") {
          upper[j] = kInf;
          bounded[j] = true;
          return;
        }
        ExpectFields(f, 4, line);
        const double value = ParseNumber(f[3], line);
        if (type == "UP" || type == "UI") {
          upper[j] = value;
          if (type == "UI") col_integer[j] = true;
        } else if (type == "LO" || type == "LI") {
          lower[j] = value;
          if (type == "LI") col_integer[j] = true;
        } else if (type == "FX") {
          lower[j] = upper[j] = value;
        } else {
          throw ParseError("unsupported bound type '" + std::string(type) + "'", line);
        }
        bounded[j] = true;
        return;
      }
      case Section::kNone:
      case Section::kName:
      case Section::kEnd:
        throw ParseError("data outside of a section", line);
    }
  });
  if (objective_row.empty() && !col_names.empty()) {
    throw ParseError("no objective (N) row", 0);
  }

  std::vector<Variable> variables;
  variables.reserve(col_names.size());
  for (size_t j = 0; j < col_names.size(); ++j) {
    if (col_integer[j]) {
      if (lower[j] == 0.0 && upper[j] == 1.0) {
        variables.push_back(Variable::Binary());
      } else {
        variables.push_back(Variable::Integer(lower[j], upper[j]));
      }
    } else {
      variables.push_back(Variable::Continuous(lower[j], upper[j]));
    }
  }
  double constant = -rhs_objective;
  if (sense == Sense::kMaximize) {
    for (double& c : objective) c = -c;
    constant = -constant;
  }
  try {
    return MipInstance(name, sense, std::move(variables), std::move(objective),
                       NormalizeConstraints(rows), constant);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
}

std::string WriteMps(const MipInstance& instance) {
  std::ostringstream out;
  const bool maximize = instance.original_sense() == Sense::kMaximize;
  auto original = [&](double c) { return maximize ? -c : c; };
  out << "NAME          " << instance.name() << '\n';
  if (maximize) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N  OBJ\n";
  for (int i = 0; i < instance.num_rows(); ++i) out << " L  R" << i << '\n';

  // Column-wise view of the rows.
  std::vector<std::vector<std::pair<int, double>>> columns(instance.num_vars());
  for (int i = 0; i < instance.num_rows(); ++i) {
    for (const RowEntry& e : instance.row(i).entries) columns[e.var].push_back({i, e.coef});
  }
  out << "COLUMNS\n";
  bool in_marker = false;
  int marker = 0;
  for (int j = 0; j < instance.num_vars(); ++j) {
    const bool integral = instance.variable(j).kind != VarKind::kContinuous;
    if (integral != in_marker) {
      out << "    MARKER" << marker++ << "  'MARKER'  "
          << (integral ? "'INTORG'" : "'INTEND'") << '\n';
      in_marker = integral;
    }
    const double c = instance.objective()[j];
    if (c != 0.0 || columns[j].empty()) {
      out << "    C" << j << "  OBJ  " << FormatDouble(original(c)) << '\n';
    }
    for (const auto& [i, coef] : columns[j]) {
      out << "    C" << j << "  R" << i << "  " << FormatDouble(coef) << '\n';
    }
  }
  if (in_marker) out << "    MARKER" << marker << "  'MARKER'  'INTEND'\n";
  out << "RHS\n";
  if (instance.objective_constant() != 0.0) {
    out << "    RHS  OBJ  " << FormatDouble(-original(instance.objective_constant()))
        << '\n';
  }
  for (int i = 0; i < instance.num_rows(); ++i) {
    if (instance.row(i).rhs != 0.0) {
      out << "    RHS  R" << i << "  " << FormatDouble(instance.row(i).rhs) << '\n';
    }
  }
  out << "BOUNDS\n";
  for (int j = 0; j < instance.num_vars(); ++j) {
    const Variable& v = instance.variable(j);
    switch (v.kind) {
      case VarKind::kBinary:
        out << " BV BND  C" << j << '\n';
        break;
      case VarKind::kInteger:
      case VarKind::kContinuous:
        if (v.lower != 0.0) {
          out << " LO BND  C" << j << "  " << FormatDouble(v.lower) << '\n';
        }
        if (std::isfinite(v.upper)) {
          out << " UP BND  C" << j << "  " << FormatDouble(v.upper) << '\n';
        }
        break;
    }
  }
  out << "ENDATA\n";
  return out.str();
}

MipInstance ReadInstanceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const bool is_mps = path.size() >= 4 && (path.ends_with(".mps") || path.ends_with(".MPS"));
  return is_mps ? ParseMps(text) : ParseInstance(text);
}

void WriteInstanceFile(const MipInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const bool is_mps = path.ends_with(".mps") || path.ends_with(".MPS");
  out << (is_mps ? WriteMps(instance) : SerializeInstance(instance));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace bprb
