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

#ifndef BPRB_BIGRAPH_H_
#define BPRB_BIGRAPH_H_

#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "bprb/mip.h"

namespace bprb {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BipartiteEdge {
  int var = 0;
  int cons = 0;
  double coef = 0.0;
};

// Variable-constraint graph of a binary program: one edge per structural
// nonzero of A. Edges are ordered by constraint, then variable.
struct BipartiteGraph {
  int num_vars = 0;
  int num_cons = 0;
  std::vector<BipartiteEdge> edges;
  // CSR adjacency: edge ids incident to each node, sorted by the opposite
  // endpoint's index.
  std::vector<int> var_offsets;
  std::vector<int> var_edges;
  std::vector<int> cons_offsets;
  std::vector<int> cons_edges;

  int VarDegree(int j) const { return var_offsets[j + 1] - var_offsets[j]; }
  int ConsDegree(int i) const { return cons_offsets[i + 1] - cons_offsets[i]; }
};

inline constexpr int kVarFeatures = 8;
inline constexpr int kConsFeatures = 5;
inline constexpr int kEdgeFeatures = 1;

// Static node and edge features, min-max normalized per column to [0, 1]
// within one instance (constant columns become 0).
//
// variables:   c_j, degree, mean/min/max of column j, #positive, #negative,
//              |c_j| / ||c||_inf
// constraints: b_i, degree, mean/min/max of row i
// edges:       a_ij
struct FeatureSet {
  RowMatrix var_features;
  RowMatrix cons_features;
  RowMatrix edge_features;
};

BipartiteGraph BuildBigraph(const MipInstance& instance);

// Raw (unnormalized) features, exposed for inspection and testing.
FeatureSet ExtractRawFeatures(const MipInstance& instance, const BipartiteGraph& graph);
FeatureSet ExtractFeatures(const MipInstance& instance, const BipartiteGraph& graph);

// Min-max normalizes each column in place.
void NormalizeColumns(RowMatrix& matrix);

// Writes "kind,index,f0,f1,..." rows for debugging.
void WriteFeaturesCsv(const FeatureSet& features, std::ostream& out);

}  // namespace bprb

#endif  // BPRB_BIGRAPH_H_
