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

#include "bprb/bigraph.h"

#include <algorithm>
#include <cmath>

#include "bprb/error.h"
#include "bprb/instance_io.h"

namespace bprb {

BipartiteGraph BuildBigraph(const MipInstance& instance) {
  if (!instance.IsPureBinary()) {
    throw UnsupportedInstanceError("bipartite features require a pure binary instance");
  }
  BipartiteGraph g;
  g.num_vars = instance.num_vars();
  g.num_cons = instance.num_rows();
  g.edges.reserve(instance.num_nonzeros());
  g.cons_offsets.assign(g.num_cons + 1, 0);
  for (int i = 0; i < g.num_cons; ++i) {
    for (const RowEntry& e : instance.row(i).entries) g.edges.push_back({e.var, i, e.coef});
    g.cons_offsets[i + 1] = static_cast<int>(g.edges.size());
  }
  g.cons_edges.resize(g.edges.size());
  for (size_t e = 0; e < g.edges.size(); ++e) g.cons_edges[e] = static_cast<int>(e);

  // Counting sort by variable keeps constraint order within each column.
  g.var_offsets.assign(g.num_vars + 1, 0);
  for (const BipartiteEdge& e : g.edges) ++g.var_offsets[e.var + 1];
  for (int j = 0; j < g.num_vars; ++j) g.var_offsets[j + 1] += g.var_offsets[j];
  g.var_edges.resize(g.edges.size());
  std::vector<int> cursor(g.var_offsets.begin(), g.var_offsets.end() - 1);
  for (size_t e = 0; e < g.edges.size(); ++e) {
    g.var_edges[cursor[g.edges[e].var]++] = static_cast<int>(e);
  }
  return g;
}

FeatureSet ExtractRawFeatures(const MipInstance& instance, const BipartiteGraph& g) {
  if (g.num_vars != instance.num_vars() || g.num_cons != instance.num_rows()) {
    throw DimensionError("graph does not match instance");
  }
  FeatureSet f;
  f.var_features = RowMatrix::Zero(g.num_vars, kVarFeatures);
  f.cons_features = RowMatrix::Zero(g.num_cons, kConsFeatures);
  f.edge_features = RowMatrix::Zero(static_cast<Eigen::Index>(g.edges.size()), kEdgeFeatures);

  double c_inf = 0.0;
  for (double c : instance.objective()) c_inf = std::max(c_inf, std::abs(c));

  for (int j = 0; j < g.num_vars; ++j) {
    const double c = instance.objective()[j];
    const int degree = g.VarDegree(j);
    double sum = 0.0, lo = 0.0, hi = 0.0;
    int positive = 0, negative = 0;
    for (int k = g.var_offsets[j]; k < g.var_offsets[j + 1]; ++k) {
      const double a = g.edges[g.var_edges[k]].coef;
      sum += a;
      lo = k == g.var_offsets[j] ? a : std::min(lo, a);
      hi = k == g.var_offsets[j] ? a : std::max(hi, a);
      if (a > 0) ++positive;
      if (a < 0) ++negative;
    }
    auto row = f.var_features.row(j);
    row << c, degree, degree > 0 ? sum / degree : 0.0, lo, hi, positive, negative,
        c_inf > 0 ? std::abs(c) / c_inf : 0.0;
  }
  for (int i = 0; i < g.num_cons; ++i) {
    const int degree = g.ConsDegree(i);
    double sum = 0.0, lo = 0.0, hi = 0.0;
    for (int k = g.cons_offsets[i]; k < g.cons_offsets[i + 1]; ++k) {
      const double a = g.edges[g.cons_edges[k]].coef;
      sum += a;
      lo = k == g.cons_offsets[i] ? a : std::min(lo, a);
      hi = k == g.cons_offsets[i] ? a : std::max(hi, a);
    }
    f.cons_features.row(i) << instance.row(i).rhs, degree, degree > 0 ? sum / degree : 0.0, lo,
        hi;
  }
  for (size_t e = 0; e < g.edges.size(); ++e) f.edge_features(e, 0) = g.edges[e].coef;
  return f;
}

void NormalizeColumns(RowMatrix& matrix) {
  for (Eigen::Index col = 0; col < matrix.cols(); ++col) {
    if (matrix.rows() == 0) return;
    const double lo = matrix.col(col).minCoeff();
    const double hi = matrix.col(col).maxCoeff();
    if (hi > lo) {
      const double span = hi - lo;
      for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        matrix(r, col) = (matrix(r, col) - lo) / span;
      }
    } else {
      matrix.col(col).setZero();
    }
  }
}

FeatureSet ExtractFeatures(const MipInstance& instance, const BipartiteGraph& g) {
  FeatureSet f = ExtractRawFeatures(instance, g);
  NormalizeColumns(f.var_features);
  NormalizeColumns(f.cons_features);
  NormalizeColumns(f.edge_features);
  return f;
}

void WriteFeaturesCsv(const FeatureSet& features, std::ostream& out) {
  auto dump = [&out](const char* kind, const RowMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << kind << ',' << r;
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << FormatDouble(m(r, c));
      out << '\n';
    }
  };
  out << "kind,index,features\n";
  dump("var", features.var_features);
  dump("cons", features.cons_features);
  dump("edge", features.edge_features);
}

}  // namespace bprb
