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

#ifndef BPRB_HARNESS_H_
#define BPRB_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bprb/gcn.h"
#include "bprb/instance_gen.h"
#include "bprb/mip.h"
#include "bprb/search.h"

namespace bprb {

struct ExperimentConfig {
  Family family = Family::kVertexCover;
  int train_size = 100;
  int eval_size = 30;
  FamilyScale scale;
  uint64_t train_seed = 1;
  uint64_t eval_seed = 1000000;
  double eta = 0.4;
  double budget_s = 50.0;
  double label_budget_s = 10.0;
  std::vector<std::string> methods = {"bp_rb", "pb_dfs", "rounding"};
  std::string weights_path;
  std::string out_dir = ".";
  NodeSolver node_solver = NodeSolver::kDive;

  void Validate() const;
};

// exp(mean(ln(v + shift))) - shift.
double ShiftedGeomean(std::span<const double> values, double shift = 1.0);

struct ResultRow {
  std::string instance_id;
  std::string method;
  bool found = false;
  // Objectives are in the instance's original sense.
  std::optional<double> best_objective;
  std::optional<double> first_objective;
  std::optional<double> first_time;
  std::optional<double> best_time;
  double total_time = 0.0;
  int64_t nodes = 0;
  double eta_used = 0.0;
  int free_vars = 0;
};

// One line of the Table-1 style summary. Objective and time columns are
// shifted geometric means over the rows of this method that found a
// feasible solution; they are empty when there is none.
struct SummaryRow {
  std::string problem;
  std::string heuristic;
  std::optional<double> best_heuristic_objective;
  std::optional<double> best_heuristic_time;
  std::optional<double> best_objective;
  std::optional<double> best_time;
  int no_feasible = 0;
  std::optional<double> total_time;
};

struct BenchmarkResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
};

// "VC (Min.)" style label used in the Problem column.
std::string ProblemLabel(Family family);

bool IsKnownMethod(const std::string& method);
bool IsLearnedMethod(const std::string& method);

// The evaluation instances of a config: seeds eval_seed, eval_seed+1, ...
std::vector<MipInstance> GenerateEvalSet(const ExperimentConfig& config);
std::vector<MipInstance> GenerateTrainSet(const ExperimentConfig& config);

ResultRow SolveWithMethod(const MipInstance& instance, const std::string& method,
                          const GcnParams* params, double eta, const Budget& budget,
                          const SearchOptions& options = {});

ResultRow MakeResultRow(const MipInstance& instance, const std::string& method,
                        const SearchRecord& record);

// Aggregates rows of one problem; methods appear in first-seen order.
std::vector<SummaryRow> Summarize(std::span<const ResultRow> rows, const std::string& problem);

// Solves every instance with every method. Rows are ordered by
// (instance id, method).
BenchmarkResult RunMethods(std::span<const MipInstance> instances, const GcnParams* params,
                           std::span<const std::string> methods, double eta,
                           const Budget& budget, const std::string& problem,
                           const SearchOptions& options = {});

// Generates the evaluation set and runs the configured methods. The learned
// methods need `params`, or weights loaded from config.weights_path.
BenchmarkResult RunBenchmark(const ExperimentConfig& config, const GcnParams* params);
BenchmarkResult RunBenchmark(const ExperimentConfig& config);

// Timing columns are optional so that repeated runs give identical bytes.
void WriteResultsCsv(std::span<const ResultRow> rows, std::ostream& out,
                     bool include_times = true);
void WriteSummaryCsv(std::span<const SummaryRow> summary, std::ostream& out,
                     bool include_times = true);

struct SweepBlock {
  double eta = 0.0;
  SummaryRow summary;
  double mean_free_vars = 0.0;
  // |B'| per instance at the requested eta, in instance order.
  std::vector<int> free_vars;
  std::vector<ResultRow> rows;
};

std::vector<double> DefaultSweepEtas();

std::vector<SweepBlock> SweepFixedPortion(std::span<const MipInstance> instances,
                                          const GcnParams& params,
                                          std::span<const double> etas, const Budget& budget,
                                          const std::string& problem,
                                          const SearchOptions& options = {});

void WriteSweepCsv(std::span<const SweepBlock> blocks, std::ostream& out,
                   bool include_times = true);

struct ReductionReportRow {
  std::string instance_id;
  double eta = 0.0;
  ReductionStats stats;
};

ReductionReportRow MakeReductionReportRow(const MipInstance& instance,
                                          const SearchRecord& record);
void WriteReductionReportCsv(std::span<const ReductionReportRow> rows, std::ostream& out);

struct LabelOutcome {
  std::vector<LabeledExample> labeled;
  std::vector<double> optimal_objectives;  // original sense, parallel to `labeled`
  std::vector<std::string> skipped;        // ids not solved to optimality
};

// Solves each instance exactly; instances not proven optimal within the
// budget are skipped.
LabelOutcome LabelInstances(std::span<const MipInstance> instances, const Budget& budget);

// Labels the training set of `config` and writes <id>.bpmip, <id>.labels and
// skipped.log into config.out_dir. Throws if nothing could be labeled.
LabelOutcome LabelDataset(const ExperimentConfig& config);

std::string SerializeLabels(std::span<const int> labels, double objective);
std::vector<int> ParseLabels(std::string_view text);

// Reads every <id>.labels with its <id>.bpmip from a directory, sorted by id.
std::vector<LabeledExample> ReadLabeledDataset(const std::string& dir);

}  // namespace bprb

#endif  // BPRB_HARNESS_H_
