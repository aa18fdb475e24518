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

// Command line driver: generate, label, train, solve, sweep, report.
//
// Every flag lives on the top-level app so one key=value config file
// (--config) can set any of them; subcommands only select the action.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bprb/bigraph.h"
#include "bprb/error.h"
#include "bprb/gcn.h"
#include "bprb/harness.h"
#include "bprb/instance_gen.h"
#include "bprb/instance_io.h"
#include "bprb/search.h"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string family = "vc";
  int n = 50;
  int affinity = 4;
  int items = 0;  // auctions; 0 picks the default ratio
  int count = 30;
  uint64_t seed = 1;
  double eta = 0.4;
  double budget_s = 50.0;
  std::vector<std::string> methods = {"bp_rb", "pb_dfs", "rounding"};
  std::string weights;
  std::string out = "out";
  std::string data;
  std::vector<std::string> instances;
  std::vector<double> etas = bprb::DefaultSweepEtas();
  int epochs = 300;
  int hidden = 16;
  int layers = 4;
  double learning_rate = 1e-2;
  double validation_fraction = 0.2;
  std::string node_solver = "dive";
  bool no_times = false;
  bool features = false;
};

bprb::ExperimentConfig ToConfig(const Flags& f) {
  bprb::ExperimentConfig cfg;
  cfg.family = bprb::ParseFamily(f.family);
  cfg.train_size = f.count;
  cfg.eval_size = f.count;
  cfg.scale.n_nodes = f.n;
  cfg.scale.affinity = f.affinity;
  cfg.scale.n_bids = f.n;
  cfg.scale.n_items = f.items > 0 ? f.items : bprb::DefaultAuctionItems(f.n);
  cfg.train_seed = f.seed;
  cfg.eval_seed = f.seed;
  cfg.eta = f.eta;
  cfg.budget_s = f.budget_s;
  cfg.label_budget_s = f.budget_s;
  cfg.methods = f.methods;
  cfg.weights_path = f.weights;
  cfg.out_dir = f.out;
  if (f.node_solver == "exact") {
    cfg.node_solver = bprb::NodeSolver::kExact;
  } else if (f.node_solver != "dive") {
    throw bprb::InvalidParameterError("node solver must be 'dive' or 'exact'");
  }
  return cfg;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bprb::IoError("cannot write " + path.string());
  out << text;
}

// Explicit instance files win over generated ones.
std::vector<bprb::MipInstance> LoadOrGenerate(const Flags& f, const bprb::ExperimentConfig& cfg) {
  if (f.instances.empty()) return bprb::GenerateEvalSet(cfg);
  std::vector<bprb::MipInstance> out;
  for (const std::string& path : f.instances) out.push_back(bprb::ReadInstanceFile(path));
  return out;
}

bprb::GcnParams RequireWeights(const Flags& f) {
  if (f.weights.empty()) throw bprb::IoError("--weights is required");
  if (!fs::exists(f.weights)) throw bprb::IoError("weights file not found: " + f.weights);
  return bprb::LoadParams(f.weights);
}

int Generate(const Flags& f) {
  const bprb::ExperimentConfig cfg = ToConfig(f);
  fs::create_directories(f.out);
  std::ostringstream manifest;
  manifest << "instance_id,file,vars,rows,nonzeros\n";
  for (const bprb::MipInstance& inst : bprb::GenerateEvalSet(cfg)) {
    const std::string file = inst.name() + ".bpmip";
    WriteFile(fs::path(f.out) / file, bprb::SerializeInstance(inst));
    manifest << inst.name() << ',' << file << ',' << inst.num_vars() << ',' << inst.num_rows()
             << ',' << inst.num_nonzeros() << '\n';
  }
  WriteFile(fs::path(f.out) / "manifest.csv", manifest.str());
  std::cout << "wrote " << f.count << " instances to " << f.out << "\n";
  return 0;
}

int Label(const Flags& f) {
  const bprb::LabelOutcome outcome = bprb::LabelDataset(ToConfig(f));
  std::cout << "labeled " << outcome.labeled.size() << ", skipped " << outcome.skipped.size()
            << " (see " << (fs::path(f.out) / "skipped.log").string() << ")\n";
  return 0;
}

int Train(const Flags& f) {
  if (f.data.empty()) throw bprb::IoError("--data must name a labeled dataset directory");
  if (f.weights.empty()) throw bprb::IoError("--weights must name the output file");
  const std::vector<bprb::LabeledExample> dataset = bprb::ReadLabeledDataset(f.data);
  if (dataset.empty()) throw bprb::IoError("no labeled instances in " + f.data);
  bprb::TrainConfig tc;
  tc.epochs = f.epochs;
  tc.hidden = f.hidden;
  tc.layers = f.layers;
  tc.learning_rate = f.learning_rate;
  tc.validation_fraction = f.validation_fraction;
  tc.seed = f.seed;
  const bprb::TrainResult result = bprb::Train(dataset, tc);
  bprb::SaveParams(result.params, f.weights);
  std::ofstream log(f.weights + ".log.csv");
  bprb::WriteTrainingLogCsv(result.log, log);
  const bprb::EpochLog& last = result.log.back();
  std::cout << "trained on " << result.train_size << " / validated on " << result.validation_size
            << "; best epoch " << result.best_epoch << ", final val loss " << last.val_loss
            << ", val accuracy " << last.val_accuracy << "\n";
  return 0;
}

int Solve(const Flags& f) {
  const bprb::ExperimentConfig cfg = ToConfig(f);
  cfg.Validate();
  std::optional<bprb::GcnParams> params;
  if (std::any_of(cfg.methods.begin(), cfg.methods.end(), bprb::IsLearnedMethod)) {
    params = RequireWeights(f);
  }
  bprb::Budget budget;
  budget.time_limit_s = cfg.budget_s;
  bprb::SearchOptions options;
  options.node_solver = cfg.node_solver;
  const std::vector<bprb::MipInstance> instances = LoadOrGenerate(f, cfg);
  const bprb::BenchmarkResult result =
      bprb::RunMethods(instances, params ? &*params : nullptr, cfg.methods, cfg.eta, budget,
                       bprb::ProblemLabel(cfg.family), options);
  fs::create_directories(f.out);
  std::ofstream rows(fs::path(f.out) / "results.csv");
  bprb::WriteResultsCsv(result.rows, rows, !f.no_times);
  std::ofstream summary(fs::path(f.out) / "summary.csv");
  bprb::WriteSummaryCsv(result.summary, summary, !f.no_times);
  bprb::WriteSummaryCsv(result.summary, std::cout, !f.no_times);
  return 0;
}

int Sweep(const Flags& f) {
  const bprb::ExperimentConfig cfg = ToConfig(f);
  cfg.Validate();
  const bprb::GcnParams params = RequireWeights(f);
  bprb::Budget budget;
  budget.time_limit_s = cfg.budget_s;
  bprb::SearchOptions options;
  options.node_solver = cfg.node_solver;
  const std::vector<bprb::MipInstance> instances = LoadOrGenerate(f, cfg);
  const std::vector<bprb::SweepBlock> blocks = bprb::SweepFixedPortion(
      instances, params, f.etas, budget, bprb::ProblemLabel(cfg.family), options);
  fs::create_directories(f.out);
  std::ofstream out(fs::path(f.out) / "sweep.csv");
  bprb::WriteSweepCsv(blocks, out, !f.no_times);
  bprb::WriteSweepCsv(blocks, std::cout, !f.no_times);
  return 0;
}

int Report(const Flags& f) {
  const bprb::ExperimentConfig cfg = ToConfig(f);
  cfg.Validate();
  const bprb::GcnParams params = RequireWeights(f);
  bprb::Budget budget;
  budget.time_limit_s = cfg.budget_s;
  const std::vector<bprb::MipInstance> instances = LoadOrGenerate(f, cfg);
  std::vector<bprb::ReductionReportRow> rows;
  fs::create_directories(f.out);
  for (const bprb::MipInstance& inst : instances) {
    const bprb::SearchRecord record = bprb::BpRb(inst, params, cfg.eta, budget);
    rows.push_back(bprb::MakeReductionReportRow(inst, record));
    if (f.features) {
      const bprb::BipartiteGraph graph = bprb::BuildBigraph(inst);
      std::ofstream out(fs::path(f.out) / (inst.name() + ".features.csv"));
      bprb::WriteFeaturesCsv(bprb::ExtractFeatures(inst, graph), out);
    }
  }
  std::ofstream out(fs::path(f.out) / "reduction_report.csv");
  bprb::WriteReductionReportCsv(rows, out);
  bprb::WriteReductionReportCsv(rows, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-layer prediction, reduction and guided search for binary programs"};
  app.set_config("--config", "", "key=value file setting any flag");
  app.require_subcommand(1);
  Flags f;
  app.add_option("--family", f.family, "vc, mis, ds or ca");
  app.add_option("--n", f.n, "graph nodes (vc/mis/ds) or bids (ca)");
  app.add_option("--affinity", f.affinity, "edges per arriving node");
  app.add_option("--items", f.items, "auction items (default: bids * 560 / 1500)");
  app.add_option("--count", f.count, "number of instances");
  app.add_option("--seed", f.seed, "first instance seed / training seed");
  app.add_option("--eta", f.eta, "fixed portion");
  app.add_option("--budget-s", f.budget_s, "time budget per instance, seconds");
  app.add_option("--method", f.methods, "bp_rb, pb_dfs, rounding, exact")->delimiter(',');
  app.add_option("--weights", f.weights, "BPGCN1 weights file");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--data", f.data, "labeled dataset directory (train)");
  app.add_option("--instance", f.instances, "instance files (.bpmip or .mps)");
  app.add_option("--etas", f.etas, "sweep grid")->delimiter(',');
  app.add_option("--epochs", f.epochs);
  app.add_option("--hidden", f.hidden);
  app.add_option("--layers", f.layers);
  app.add_option("--lr", f.learning_rate);
  app.add_option("--validation-fraction", f.validation_fraction);
  app.add_option("--node-solver", f.node_solver, "dive or exact");
  app.add_flag("--no-times", f.no_times, "omit timing columns from CSV output");
  app.add_flag("--features", f.features, "also dump per-instance feature CSVs (report)");

  auto add = [&](const char* name, const char* help) {
    return app.add_subcommand(name, help)->fallthrough();
  };
  CLI::App* generate = add("generate", "write instances and a manifest");
  CLI::App* label = add("label", "solve instances exactly and write labels");
  CLI::App* train = add("train", "train the GCN on a labeled dataset");
  CLI::App* solve = add("solve", "run methods and write results and summary CSVs");
  CLI::App* sweep = add("sweep", "bp_rb over a grid of fixed portions");
  CLI::App* report = add("report", "reduction statistics per instance");

  CLI11_PARSE(app, argc, argv);
  try {
    if (generate->parsed()) return Generate(f);
    if (label->parsed()) return Label(f);
    if (train->parsed()) return Train(f);
    if (solve->parsed()) return Solve(f);
    if (sweep->parsed()) return Sweep(f);
    if (report->parsed()) return Report(f);
  } catch (const bprb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
