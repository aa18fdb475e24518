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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bprb/error.h"
#include "bprb/gcn.h"
#include "bprb/harness.h"
#include "bprb/instance_gen.h"
#include "bprb/instance_io.h"
#include "bprb/mip.h"
#include "bprb/reduction.h"
#include "bprb/search.h"

namespace py = pybind11;

namespace {

using bprb::MipInstance;

bprb::Assignment ToAssignment(const MipInstance& inst, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != inst.num_vars()) {
    throw bprb::DimensionError("assignment length does not match the instance");
  }
  return bprb::Assignment::FromValues(x);
}

py::dict RecordToDict(const MipInstance& inst, const bprb::SearchRecord& r) {
  py::dict d;
  d["found"] = r.incumbent.has_value();
  if (r.incumbent) {
    d["objective"] = inst.ToOriginalSense(r.incumbent->objective);
    d["solution"] = r.incumbent->assignment.ToVector();
  } else {
    d["objective"] = py::none();
    d["solution"] = py::none();
  }
  d["nodes"] = r.nodes_processed;
  d["first_time"] = r.first_feasible_time;
  d["best_time"] = r.best_solution_time;
  d["total_time"] = r.total_time;
  d["eta_used"] = r.eta_used;
  d["conflict_retries"] = r.conflict_retries;
  d["free_vars"] = r.requested_free_vars;
  py::list trace;
  for (const bprb::NodeTrace& t : r.trace) {
    trace.append(py::make_tuple(t.node, t.found,
                                t.found ? py::cast(inst.ToOriginalSense(t.objective))
                                        : py::none()));
  }
  d["trace"] = trace;
  return d;
}

bprb::Budget MakeBudget(double budget_s) {
  bprb::Budget b;
  b.time_limit_s = budget_s;
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bi-layer prediction, problem reduction and guided search for binary programs";

  py::register_exception<bprb::Error>(m, "BprbError", PyExc_ValueError);

  py::class_<MipInstance>(m, "MipInstance")
      .def_property_readonly("name", &MipInstance::name)
      .def_property_readonly("num_vars", &MipInstance::num_vars)
      .def_property_readonly("num_rows", &MipInstance::num_rows)
      .def_property_readonly("num_nonzeros", &MipInstance::num_nonzeros)
      .def_property_readonly("is_pure_binary", &MipInstance::IsPureBinary)
      .def_property_readonly("maximize",
                             [](const MipInstance& i) {
                               return i.original_sense() == bprb::Sense::kMaximize;
                             })
      .def("__eq__", [](const MipInstance& a, const MipInstance& b) { return a == b; })
      .def("__repr__", [](const MipInstance& i) {
        return "<MipInstance " + i.name() + " vars=" + std::to_string(i.num_vars()) +
               " rows=" + std::to_string(i.num_rows()) + ">";
      });

  m.def(
      "binary_instance",
      [](const std::string& name, std::vector<double> objective,
         const std::vector<std::pair<std::vector<std::pair<int, double>>, double>>& rows,
         bool maximize) {
        if (maximize) {
          for (double& c : objective) c = -c;
        }
        std::vector<bprb::Row> built;
        for (const auto& [entries, rhs] : rows) {
          bprb::Row row;
          for (const auto& [var, coef] : entries) row.entries.push_back({var, coef});
          row.rhs = rhs;
          built.push_back(std::move(row));
        }
        return MipInstance::Binary(name,
                                   maximize ? bprb::Sense::kMaximize : bprb::Sense::kMinimize,
                                   std::move(objective), std::move(built));
      },
      py::arg("name"), py::arg("objective"), py::arg("rows"), py::arg("maximize") = false,
      "Pure binary program; objective in the given sense, rows as ([(var, coef)], rhs) "
      "meaning sum coef * x_var <= rhs.");

  m.def("parse_instance", &bprb::ParseInstance, py::arg("text"));
  m.def("serialize_instance", &bprb::SerializeInstance, py::arg("instance"));
  m.def("parse_mps", &bprb::ParseMps, py::arg("text"));
  m.def("write_mps", &bprb::WriteMps, py::arg("instance"));
  m.def("read_instance_file", &bprb::ReadInstanceFile, py::arg("path"));

  m.def(
      "generate_instance",
      [](const std::string& family, uint64_t seed, int n_nodes, int affinity, int n_items,
         int n_bids) {
        bprb::FamilyScale scale{n_nodes, affinity, n_items, n_bids};
        return bprb::GenerateFamilyInstance(bprb::ParseFamily(family), scale, seed);
      },
      py::arg("family"), py::arg("seed"), py::arg("n_nodes") = 50, py::arg("affinity") = 4,
      py::arg("n_items") = 100, py::arg("n_bids") = 150);

  m.def(
      "evaluate",
      [](const MipInstance& inst, const std::vector<int>& x) {
        const bprb::EvalResult r = bprb::Evaluate(inst, ToAssignment(inst, x));
        return py::make_tuple(r.feasible, inst.ToOriginalSense(r.objective), r.violated_rows);
      },
      py::arg("instance"), py::arg("x"),
      "Returns (feasible, objective in original sense, [(violated row, lhs)]).");

  py::class_<bprb::GcnParams>(m, "GcnParams")
      .def_static(
          "initialize",
          [](uint64_t seed, int hidden, int layers) {
            bprb::GcnDims dims;
            dims.hidden = hidden;
            dims.layers = layers;
            return bprb::GcnParams::Initialize(dims, seed);
          },
          py::arg("seed") = 0, py::arg("hidden") = 16, py::arg("layers") = 4)
      .def_property_readonly("num_parameters", &bprb::GcnParams::NumParameters)
      .def("save", [](const bprb::GcnParams& p, const std::string& path) {
        bprb::SaveParams(p, path);
      })
      .def_static("load", &bprb::LoadParams)
      .def("to_bytes",
           [](const bprb::GcnParams& p) { return py::bytes(bprb::SerializeParams(p)); })
      .def_static("from_bytes", [](const py::bytes& b) {
        return bprb::DeserializeParams(std::string(b));
      });

  m.def("predict", &bprb::Predict, py::arg("params"), py::arg("instance"));

  m.def(
      "label_instances",
      [](const std::vector<MipInstance>& instances, double budget_s) {
        const bprb::LabelOutcome out = bprb::LabelInstances(instances, MakeBudget(budget_s));
        std::vector<std::vector<int>> labels;
        for (const bprb::LabeledExample& e : out.labeled) labels.push_back(e.labels);
        return py::make_tuple(labels, out.optimal_objectives, out.skipped);
      },
      py::arg("instances"), py::arg("budget_s") = 10.0,
      "Exact labels; returns (labels of solved instances, objectives, skipped ids).");

  m.def(
      "train",
      [](const std::vector<MipInstance>& instances, const std::vector<std::vector<int>>& labels,
         int epochs, double learning_rate, int hidden, int layers, uint64_t seed,
         double validation_fraction) {
        if (instances.size() != labels.size()) {
          throw bprb::DimensionError("one label vector per instance is required");
        }
        std::vector<bprb::LabeledExample> data;
        for (size_t i = 0; i < instances.size(); ++i) data.push_back({instances[i], labels[i]});
        bprb::TrainConfig tc;
        tc.epochs = epochs;
        tc.learning_rate = learning_rate;
        tc.hidden = hidden;
        tc.layers = layers;
        tc.seed = seed;
        tc.validation_fraction = validation_fraction;
        bprb::TrainResult r;
        {
          py::gil_scoped_release release;
          r = bprb::Train(data, tc);
        }
        py::list log;
        for (const bprb::EpochLog& e : r.log) {
          py::dict row;
          row["epoch"] = e.epoch;
          row["train_loss"] = e.train_loss;
          row["val_loss"] = e.val_loss;
          row["val_accuracy"] = e.val_accuracy;
          log.append(row);
        }
        return py::make_tuple(r.params, log);
      },
      py::arg("instances"), py::arg("labels"), py::arg("epochs") = 300,
      py::arg("learning_rate") = 1e-2, py::arg("hidden") = 16, py::arg("layers") = 4,
      py::arg("seed") = 0, py::arg("validation_fraction") = 0.2);

  m.def(
      "reduce",
      [](const MipInstance& inst, const std::vector<double>& p, double eta) -> py::object {
        const bprb::FixedSet fixed = bprb::SelectFixSet(p, eta);
        bprb::ReductionOutcome out = bprb::ReduceToFixpoint(inst, fixed);
        if (const auto* c = std::get_if<bprb::Conflict>(&out)) {
          py::dict d;
          d["conflict_row"] = c->row;
          d["explanation"] = c->explanation;
          return d;
        }
        auto& red = std::get<bprb::ReducedInstance>(out);
        py::dict d;
        py::dict fixes;
        for (const auto& [var, fix] : red.fixed.entries()) fixes[py::int_(var)] = fix.value;
        d["sub"] = red.sub;
        d["fixed"] = fixes;
        d["removed_rows"] = red.removed_rows;
        d["sub_to_parent"] = red.sub_to_parent;
        d["objective_offset"] = red.objective_offset;
        d["free_vars"] = red.stats.free_vars;
        d["greedy_fixes"] = red.stats.greedy_fixes;
        d["logical_fixes"] = red.stats.logical_fixes;
        return d;
      },
      py::arg("instance"), py::arg("p"), py::arg("eta"),
      "Fixes the eta most certain variables and reduces to a fixpoint.");

  m.def(
      "bp_rb",
      [](const MipInstance& inst, const bprb::GcnParams& params, double eta, double budget_s) {
        return RecordToDict(inst, bprb::BpRb(inst, params, eta, MakeBudget(budget_s)));
      },
      py::arg("instance"), py::arg("params"), py::arg("eta") = 0.4, py::arg("budget_s") = 50.0);
  m.def(
      "pb_dfs",
      [](const MipInstance& inst, const bprb::GcnParams& params, double budget_s) {
        return RecordToDict(inst, bprb::PbDfs(inst, params, MakeBudget(budget_s)));
      },
      py::arg("instance"), py::arg("params"), py::arg("budget_s") = 50.0);
  m.def(
      "rounding_baseline",
      [](const MipInstance& inst, const std::vector<double>& p) {
        return RecordToDict(inst, bprb::RoundingBaseline(inst, p));
      },
      py::arg("instance"), py::arg("p"));
  m.def(
      "exact_bnb",
      [](const MipInstance& inst, double budget_s) {
        const bprb::ExactResult r = bprb::ExactBnb(inst, MakeBudget(budget_s));
        py::dict d = RecordToDict(inst, r.record);
        d["status"] = bprb::ExactStatusName(r.status);
        return d;
      },
      py::arg("instance"), py::arg("budget_s") = 50.0);

  m.def(
      "shifted_geomean",
      [](const std::vector<double>& values, double shift) {
        return bprb::ShiftedGeomean(values, shift);
      },
      py::arg("values"), py::arg("shift") = 1.0);
}
