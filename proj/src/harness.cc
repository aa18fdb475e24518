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

#include "bprb/harness.h"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bprb/error.h"
#include "bprb/instance_io.h"

namespace bprb {
namespace {

namespace fs = std::filesystem;

double Milliseconds(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

std::optional<double> Milliseconds(std::optional<double> seconds) {
  if (!seconds) return std::nullopt;
  return Milliseconds(*seconds);
}

std::string Cell(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : std::string();
}

// Aggregates are printed to 10 significant digits to hide log/exp roundoff.
std::string StatCell(const std::optional<double>& value) {
  if (!value) return {};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", *value);
  return buf;
}

std::string TimeCell(const std::optional<double>& value) {
  if (!value) return {};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *value);
  return buf;
}

std::optional<double> GeomeanOf(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return ShiftedGeomean(values);
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (train_size <= 0 || eval_size <= 0) {
    throw InvalidParameterError("instance counts must be positive");
  }
  if (!(eta >= 0.0 && eta < 1.0)) throw InvalidParameterError("eta must lie in [0, 1)");
  if (!(budget_s > 0.0) || !(label_budget_s > 0.0)) {
    throw InvalidParameterError("time budgets must be positive");
  }
  for (const std::string& method : methods) {
    if (!IsKnownMethod(method)) throw InvalidParameterError("unknown method '" + method + "'");
  }
}

double ShiftedGeomean(std::span<const double> values, double shift) {
  if (values.empty()) throw InvalidParameterError("shifted geometric mean of an empty list");
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidParameterError("shifted geometric mean needs finite nonnegative values");
    }
    log_sum += std::log(v + shift);
  }
  return std::exp(log_sum / static_cast<double>(values.size())) - shift;
}

std::string ProblemLabel(Family family) {
  std::string name = FamilyName(family);
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  const bool maximize = family == Family::kIndependentSet || family == Family::kAuction;
  return name + (maximize ? " (Max.)" : " (Min.)");
}

bool IsKnownMethod(const std::string& method) {
  return method == "bp_rb" || method == "pb_dfs" || method == "rounding" || method == "exact";
}

bool IsLearnedMethod(const std::string& method) { return method != "exact"; }

std::vector<MipInstance> GenerateEvalSet(const ExperimentConfig& config) {
  std::vector<MipInstance> instances;
  instances.reserve(config.eval_size);
  for (int i = 0; i < config.eval_size; ++i) {
    instances.push_back(GenerateFamilyInstance(config.family, config.scale, config.eval_seed + i));
  }
  return instances;
}

std::vector<MipInstance> GenerateTrainSet(const ExperimentConfig& config) {
  std::vector<MipInstance> instances;
  instances.reserve(config.train_size);
  for (int i = 0; i < config.train_size; ++i) {
    instances.push_back(
        GenerateFamilyInstance(config.family, config.scale, config.train_seed + i));
  }
  return instances;
}

ResultRow MakeResultRow(const MipInstance& instance, const std::string& method,
                        const SearchRecord& record) {
  ResultRow row;
  row.instance_id = instance.name();
  row.method = method;
  row.found = record.incumbent.has_value();
  if (record.incumbent) {
    row.best_objective = instance.ToOriginalSense(record.incumbent->objective);
    row.first_objective = instance.ToOriginalSense(*record.first_objective);
  }
  row.first_time = Milliseconds(record.first_feasible_time);
  row.best_time = Milliseconds(record.best_solution_time);
  row.total_time = Milliseconds(record.total_time);
  row.nodes = record.nodes_processed;
  row.eta_used = record.eta_used;
  row.free_vars = record.requested_free_vars;
  return row;
}

ResultRow SolveWithMethod(const MipInstance& instance, const std::string& method,
                          const GcnParams* params, double eta, const Budget& budget,
                          const SearchOptions& options) {
  if (!IsKnownMethod(method)) throw InvalidParameterError("unknown method '" + method + "'");
  if (IsLearnedMethod(method) && params == nullptr) {
    throw InvalidParameterError("method '" + method + "' needs trained weights");
  }
  SearchRecord record;
  if (method == "bp_rb") {
    record = BpRb(instance, *params, eta, budget, options);
  } else if (method == "pb_dfs") {
    record = PbDfs(instance, *params, budget, options);
  } else if (method == "rounding") {
    const auto start = std::chrono::steady_clock::now();
    const ProbabilityVector p = Predict(*params, instance);
    const double predict_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record = RoundingBaseline(instance, p);
    if (record.first_feasible_time) *record.first_feasible_time += predict_time;
    if (record.best_solution_time) *record.best_solution_time += predict_time;
    record.total_time += predict_time;
  } else {
    record = ExactBnb(instance, budget).record;
  }
  return MakeResultRow(instance, method, record);
}

std::vector<SummaryRow> Summarize(std::span<const ResultRow> rows, const std::string& problem) {
  std::vector<std::string> methods;
  for (const ResultRow& row : rows) {
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
  }
  std::vector<SummaryRow> summary;
  for (const std::string& method : methods) {
    std::vector<double> heuristic_obj, heuristic_time, best_obj, best_time, total_time;
    SummaryRow out;
    out.problem = problem;
    out.heuristic = method;
    for (const ResultRow& row : rows) {
      if (row.method != method) continue;
      if (!row.found) {
        ++out.no_feasible;
        continue;
      }
      heuristic_obj.push_back(*row.first_objective);
      heuristic_time.push_back(*row.first_time);
      best_obj.push_back(*row.best_objective);
      best_time.push_back(*row.best_time);
      total_time.push_back(row.total_time);
    }
    out.best_heuristic_objective = GeomeanOf(heuristic_obj);
    out.best_heuristic_time = GeomeanOf(heuristic_time);
    out.best_objective = GeomeanOf(best_obj);
    out.best_time = GeomeanOf(best_time);
    out.total_time = GeomeanOf(total_time);
    summary.push_back(std::move(out));
  }
  return summary;
}

BenchmarkResult RunMethods(std::span<const MipInstance> instances, const GcnParams* params,
                           std::span<const std::string> methods, double eta,
                           const Budget& budget, const std::string& problem,
                           const SearchOptions& options) {
  for (const std::string& method : methods) {
    if (!IsKnownMethod(method)) throw InvalidParameterError("unknown method '" + method + "'");
  }
  BenchmarkResult result;
  for (const MipInstance& instance : instances) {
    for (const std::string& method : methods) {
      result.rows.push_back(SolveWithMethod(instance, method, params, eta, budget, options));
    }
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
                     return a.method < b.method;
                   });
  std::vector<ResultRow> in_method_order;
  for (const std::string& method : methods) {
    for (const ResultRow& row : result.rows) {
      if (row.method == method) in_method_order.push_back(row);
    }
  }
  result.summary = Summarize(in_method_order, problem);
  return result;
}

BenchmarkResult RunBenchmark(const ExperimentConfig& config, const GcnParams* params) {
  config.Validate();
  Budget budget;
  budget.time_limit_s = config.budget_s;
  SearchOptions options;
  options.node_solver = config.node_solver;
  const std::vector<MipInstance> instances = GenerateEvalSet(config);
  return RunMethods(instances, params, config.methods, config.eta, budget,
                    ProblemLabel(config.family), options);
}

BenchmarkResult RunBenchmark(const ExperimentConfig& config) {
  config.Validate();
  const bool needs_weights =
      std::any_of(config.methods.begin(), config.methods.end(), IsLearnedMethod);
  if (!needs_weights) return RunBenchmark(config, nullptr);
  if (config.weights_path.empty()) throw IoError("no weights file given for learned methods");
  if (!fs::exists(config.weights_path)) {
    throw IoError("weights file not found: " + config.weights_path);
  }
  const GcnParams params = LoadParams(config.weights_path);
  return RunBenchmark(config, &params);
}

void WriteResultsCsv(std::span<const ResultRow> rows, std::ostream& out, bool include_times) {
  out << "instance_id,method,found,best_objective,first_objective,nodes,eta_used,free_vars";
  if (include_times) out << ",first_time,best_time,total_time";
  out << '\n';
  for (const ResultRow& row : rows) {
    out << row.instance_id << ',' << row.method << ',' << (row.found ? 1 : 0) << ','
        << Cell(row.best_objective) << ',' << Cell(row.first_objective) << ',' << row.nodes
        << ',' << FormatDouble(row.eta_used) << ',' << row.free_vars;
    if (include_times) {
      out << ',' << TimeCell(row.first_time) << ',' << TimeCell(row.best_time) << ','
          << TimeCell(row.total_time);
    }
    out << '\n';
  }
}

void WriteSummaryCsv(std::span<const SummaryRow> summary, std::ostream& out,
                     bool include_times) {
  out << "Problem,Heuristic,Best Heuristic Solution Objective";
  if (include_times) out << ",Best Heuristic Solution Time";
  out << ",Best Solution Objective";
  if (include_times) out << ",Best Solution Time";
  out << ",# Instances no feasible solution";
  if (include_times) out << ",Heuristic Total Time";
  out << '\n';
  for (const SummaryRow& row : summary) {
    out << row.problem << ',' << row.heuristic << ',' << StatCell(row.best_heuristic_objective);
    if (include_times) out << ',' << TimeCell(row.best_heuristic_time);
    out << ',' << StatCell(row.best_objective);
    if (include_times) out << ',' << TimeCell(row.best_time);
    out << ',' << row.no_feasible;
    if (include_times) out << ',' << TimeCell(row.total_time);
    out << '\n';
  }
}

std::vector<double> DefaultSweepEtas() { return {0.2, 0.4, 0.6, 0.8}; }

std::vector<SweepBlock> SweepFixedPortion(std::span<const MipInstance> instances,
                                          const GcnParams& params,
                                          std::span<const double> etas, const Budget& budget,
                                          const std::string& problem,
                                          const SearchOptions& options) {
  if (etas.empty()) throw InvalidParameterError("eta grid is empty");
  std::vector<SweepBlock> blocks;
  for (double eta : etas) {
    SweepBlock block;
    block.eta = eta;
    for (const MipInstance& instance : instances) {
      const SearchRecord record = BpRb(instance, params, eta, budget, options);
      block.rows.push_back(MakeResultRow(instance, "bp_rb", record));
      block.free_vars.push_back(record.requested_free_vars);
    }
    block.summary = Summarize(block.rows, problem).front();
    double sum = 0.0;
    for (int f : block.free_vars) sum += f;
    block.mean_free_vars = block.free_vars.empty() ? 0.0 : sum / block.free_vars.size();
    blocks.push_back(std::move(block));
  }
  return blocks;
}

void WriteSweepCsv(std::span<const SweepBlock> blocks, std::ostream& out, bool include_times) {
  out << "Problem,Fixed Portion,Best Heuristic Solution Objective";
  if (include_times) out << ",Best Heuristic Solution Time";
  out << ",Best Solution Objective,# Instances no feasible solution,Mean Free Variables\n";
  for (const SweepBlock& block : blocks) {
    char portion[32];
    std::snprintf(portion, sizeof(portion), "%g%%", block.eta * 100.0);
    out << block.summary.problem << ',' << portion << ','
        << StatCell(block.summary.best_heuristic_objective);
    if (include_times) out << ',' << TimeCell(block.summary.best_heuristic_time);
    out << ',' << StatCell(block.summary.best_objective) << ',' << block.summary.no_feasible << ','
        << StatCell(block.mean_free_vars) << '\n';
  }
}

ReductionReportRow MakeReductionReportRow(const MipInstance& instance,
                                          const SearchRecord& record) {
  return {instance.name(), record.eta_used, record.reduction};
}

void WriteReductionReportCsv(std::span<const ReductionReportRow> rows, std::ostream& out) {
  out << "instance_id,eta,greedy_fixes,logical_fixes,removed_rows,free_vars,remaining_rows,"
         "sweeps\n";
  for (const ReductionReportRow& row : rows) {
    out << row.instance_id << ',' << FormatDouble(row.eta) << ',' << row.stats.greedy_fixes
        << ',' << row.stats.logical_fixes << ',' << row.stats.removed_rows << ','
        << row.stats.free_vars << ',' << row.stats.remaining_rows << ',' << row.stats.sweeps
        << '\n';
  }
}

LabelOutcome LabelInstances(std::span<const MipInstance> instances, const Budget& budget) {
  LabelOutcome outcome;
  for (const MipInstance& instance : instances) {
    const ExactResult exact = ExactBnb(instance, budget);
    if (exact.status != ExactStatus::kOptimal || !exact.record.incumbent) {
      outcome.skipped.push_back(instance.name());
      continue;
    }
    std::vector<int> labels = exact.record.incumbent->assignment.ToVector();
    outcome.labeled.push_back({instance, std::move(labels)});
    outcome.optimal_objectives.push_back(
        instance.ToOriginalSense(exact.record.incumbent->objective));
  }
  return outcome;
}

LabelOutcome LabelDataset(const ExperimentConfig& config) {
  config.Validate();
  Budget budget;
  budget.time_limit_s = config.label_budget_s;
  const std::vector<MipInstance> instances = GenerateTrainSet(config);
  LabelOutcome outcome = LabelInstances(instances, budget);
  if (outcome.labeled.empty()) {
    throw Error("no instance could be labeled within " + FormatDouble(config.label_budget_s) +
                " s");
  }
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  for (size_t i = 0; i < outcome.labeled.size(); ++i) {
    const LabeledExample& example = outcome.labeled[i];
    const std::string& id = example.instance.name();
    WriteTextFile(dir / (id + ".bpmip"), SerializeInstance(example.instance));
    WriteTextFile(dir / (id + ".labels"),
                  SerializeLabels(example.labels, outcome.optimal_objectives[i]));
  }
  std::string log;
  for (const std::string& id : outcome.skipped) log += id + " budget-exhausted\n";
  WriteTextFile(dir / "skipped.log", log);
  return outcome;
}

std::string SerializeLabels(std::span<const int> labels, double objective) {
  std::string text = "bplabel 1 " + std::to_string(labels.size()) + " " +
                     FormatDouble(objective) + "\n";
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) text += ' ';
    text += labels[i] ? '1' : '0';
  }
  text += '\n';
  return text;
}

std::vector<int> ParseLabels(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic, objective;
  int version = 0;
  long long n = -1;
  if (!(in >> magic >> version >> n >> objective) || magic != "bplabel" || version != 1 ||
      n < 0) {
    throw ParseError("expected 'bplabel 1 <n> <objective>'", 1);
  }
  std::vector<int> labels;
  labels.reserve(n);
  int value;
  while (in >> value) {
    if (value != 0 && value != 1) throw ParseError("labels must be 0 or 1", 2);
    labels.push_back(value);
  }
  if (!in.eof()) throw ParseError("malformed label value", 2);
  if (static_cast<long long>(labels.size()) != n) {
    throw ParseError("expected " + std::to_string(n) + " labels, found " +
                         std::to_string(labels.size()),
                     2);
  }
  return labels;
}

std::vector<LabeledExample> ReadLabeledDataset(const std::string& dir) {
  std::vector<fs::path> label_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".labels") {
      label_files.push_back(entry.path());
    }
  }
  std::sort(label_files.begin(), label_files.end());
  std::vector<LabeledExample> dataset;
  for (const fs::path& path : label_files) {
    fs::path instance_path = path;
    instance_path.replace_extension(".bpmip");
    MipInstance instance = ParseInstance(ReadTextFile(instance_path));
    std::vector<int> labels = ParseLabels(ReadTextFile(path));
    if (static_cast<int>(labels.size()) != instance.num_vars()) {
      throw DimensionError(path.string() + " does not match its instance");
    }
    dataset.push_back({std::move(instance), std::move(labels)});
  }
  return dataset;
}

}  // namespace bprb
