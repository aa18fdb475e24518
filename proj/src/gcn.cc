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

#include "bprb/gcn.h"

#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "bprb/error.h"
#include "bprb/instance_io.h"
#include "bprb/rng.h"

namespace bprb {
namespace {

template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using SparseT = Eigen::SparseMatrix<T, Eigen::RowMajor>;

template <typename T>
struct InputT {
  MatT<T> var_features;
  MatT<T> cons_features;
  SparseT<T> cons_mean;     // m x n, row i averages the variables of row i
  SparseT<T> var_mean;      // n x m, row j averages the constraints of column j
  MatT<T> cons_edge_mean;   // m x d_e
  MatT<T> var_edge_mean;    // n x d_e
  MatT<T> cons_mask;        // m x 1, 1 iff the constraint has an edge
  MatT<T> var_mask;         // n x 1
};

template <typename T>
InputT<T> BuildInput(const BipartiteGraph& g, const FeatureSet& f) {
  if (f.var_features.rows() != g.num_vars || f.cons_features.rows() != g.num_cons ||
      f.edge_features.rows() != static_cast<Eigen::Index>(g.edges.size())) {
    throw DimensionError("feature rows do not match the bipartite graph");
  }
  const int n = g.num_vars;
  const int m = g.num_cons;
  const Eigen::Index de = f.edge_features.cols();
  InputT<T> in;
  in.var_features = f.var_features.cast<T>();
  in.cons_features = f.cons_features.cast<T>();
  in.cons_edge_mean = MatT<T>::Zero(m, de);
  in.var_edge_mean = MatT<T>::Zero(n, de);
  in.cons_mask = MatT<T>::Zero(m, 1);
  in.var_mask = MatT<T>::Zero(n, 1);

  std::vector<Eigen::Triplet<T>> cons_triplets;
  std::vector<Eigen::Triplet<T>> var_triplets;
  cons_triplets.reserve(g.edges.size());
  var_triplets.reserve(g.edges.size());
  for (int i = 0; i < m; ++i) {
    const int degree = g.ConsDegree(i);
    if (degree == 0) continue;
    in.cons_mask(i, 0) = T(1);
    const T inv = T(1) / T(degree);
    for (int k = g.cons_offsets[i]; k < g.cons_offsets[i + 1]; ++k) {
      const int e = g.cons_edges[k];
      cons_triplets.emplace_back(i, g.edges[e].var, inv);
      for (Eigen::Index d = 0; d < de; ++d) {
        in.cons_edge_mean(i, d) += T(f.edge_features(e, d)) * inv;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const int degree = g.VarDegree(j);
    if (degree == 0) continue;
    in.var_mask(j, 0) = T(1);
    const T inv = T(1) / T(degree);
    for (int k = g.var_offsets[j]; k < g.var_offsets[j + 1]; ++k) {
      const int e = g.var_edges[k];
      var_triplets.emplace_back(j, g.edges[e].cons, inv);
      for (Eigen::Index d = 0; d < de; ++d) {
        in.var_edge_mean(j, d) += T(f.edge_features(e, d)) * inv;
      }
    }
  }
  in.cons_mean.resize(m, n);
  in.cons_mean.setFromTriplets(cons_triplets.begin(), cons_triplets.end());
  in.var_mean.resize(n, m);
  in.var_mean.setFromTriplets(var_triplets.begin(), var_triplets.end());
  return in;
}

void CheckDims(const GcnParams& params, Eigen::Index var_cols, Eigen::Index cons_cols,
               Eigen::Index edge_cols) {
  const GcnDims& d = params.dims;
  if (d.var_features != var_cols || d.cons_features != cons_cols ||
      d.edge_features != edge_cols) {
    throw DimensionError("feature widths (" + std::to_string(var_cols) + "," +
                         std::to_string(cons_cols) + "," + std::to_string(edge_cols) +
                         ") do not match parameters (" + std::to_string(d.var_features) +
                         "," + std::to_string(d.cons_features) + "," +
                         std::to_string(d.edge_features) + ")");
  }
  if (static_cast<int>(params.layers.size()) != d.layers || params.embed_v.rows() != d.var_features ||
      params.embed_v.cols() != d.hidden || params.head.rows() != d.hidden) {
    throw DimensionError("parameter tensors are inconsistent with their dims");
  }
}

template <typename T>
struct LayerCache {
  MatT<T> v_in, c_in;
  MatT<T> mean_v;   // cons_mean * v_in
  MatT<T> agg_c;
  MatT<T> c_pre, c_out;
  MatT<T> mean_c;   // var_mean * c_out
  MatT<T> agg_v;
  MatT<T> v_pre, v_out;
};

template <typename T>
struct ForwardCache {
  MatT<T> v0_pre, c0_pre;
  std::vector<LayerCache<T>> layers;
  MatT<T> v_final;
};

template <typename T>
MatT<T> Cast(const RowMatrix& m) {
  return m.cast<T>();
}

template <typename T>
MatT<T> Relu(const MatT<T>& x) {
  return x.cwiseMax(T(0));
}

// Returns the n x 1 logits.
template <typename T>
MatT<T> ForwardLogits(const GcnParams& P, const InputT<T>& in, ForwardCache<T>* cache) {
  const int h = P.dims.hidden;
  const int de = P.dims.edge_features;

  MatT<T> v_pre = in.var_features * Cast<T>(P.embed_v);
  v_pre.rowwise() += Cast<T>(P.embed_v_bias).row(0);
  MatT<T> c_pre = in.cons_features * Cast<T>(P.embed_c);
  c_pre.rowwise() += Cast<T>(P.embed_c_bias).row(0);
  MatT<T> v = Relu<T>(v_pre);
  MatT<T> c = Relu<T>(c_pre);
  if (cache) {
    cache->v0_pre = std::move(v_pre);
    cache->c0_pre = std::move(c_pre);
    cache->layers.resize(P.layers.size());
  }

  for (size_t l = 0; l < P.layers.size(); ++l) {
    const GcnLayer& layer = P.layers[l];
    const MatT<T> msg_vc = Cast<T>(layer.msg_vc);
    const MatT<T> upd_c = Cast<T>(layer.upd_c);
    const MatT<T> msg_cv = Cast<T>(layer.msg_cv);
    const MatT<T> upd_v = Cast<T>(layer.upd_v);

    // variables -> constraints
    MatT<T> mean_v = in.cons_mean * v;
    MatT<T> agg_c = mean_v * msg_vc.topRows(h) + in.cons_edge_mean * msg_vc.bottomRows(de) +
                    in.cons_mask * Cast<T>(layer.msg_vc_bias);
    MatT<T> c_pre_l = c * upd_c.topRows(h) + agg_c * upd_c.bottomRows(h);
    c_pre_l.rowwise() += Cast<T>(layer.upd_c_bias).row(0);
    MatT<T> c_out = Relu<T>(c_pre_l);

    // constraints -> variables
    MatT<T> mean_c = in.var_mean * c_out;
    MatT<T> agg_v = mean_c * msg_cv.topRows(h) + in.var_edge_mean * msg_cv.bottomRows(de) +
                    in.var_mask * Cast<T>(layer.msg_cv_bias);
    MatT<T> v_pre_l = v * upd_v.topRows(h) + agg_v * upd_v.bottomRows(h);
    v_pre_l.rowwise() += Cast<T>(layer.upd_v_bias).row(0);
    MatT<T> v_out = Relu<T>(v_pre_l);

    if (cache) {
      LayerCache<T>& lc = cache->layers[l];
      lc.v_in = std::move(v);
      lc.c_in = std::move(c);
      lc.mean_v = std::move(mean_v);
      lc.agg_c = std::move(agg_c);
      lc.c_pre = std::move(c_pre_l);
      lc.c_out = c_out;
      lc.mean_c = std::move(mean_c);
      lc.agg_v = std::move(agg_v);
      lc.v_pre = std::move(v_pre_l);
      lc.v_out = v_out;
    }
    v = std::move(v_out);
    c = std::move(c_out);
  }
  MatT<T> logits = v * Cast<T>(P.head);
  logits.array() += T(P.head_bias(0, 0));
  if (cache) cache->v_final = std::move(v);
  return logits;
}

template <typename T>
T Sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <typename T>
T ClampProbability(T p) {
  return std::clamp(p, T(kProbabilityEpsilon), T(1) - T(kProbabilityEpsilon));
}

template <typename T>
T LossT(std::span<const T> p, std::span<const int> labels, const ClassWeights& w) {
  if (p.size() != labels.size()) {
    throw DimensionError("loss: " + std::to_string(p.size()) + " probabilities for " +
                         std::to_string(labels.size()) + " labels");
  }
  if (p.empty()) return T(0);
  T sum = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const T q = ClampProbability(p[i]);
    sum += labels[i] == 1 ? T(w.positive) * std::log(q) : T(w.negative) * std::log(T(1) - q);
  }
  return -sum / T(p.size());
}

void CheckLabels(std::span<const int> labels, int n) {
  if (static_cast<int>(labels.size()) != n) {
    throw DimensionError("expected " + std::to_string(n) + " labels, got " +
                         std::to_string(labels.size()));
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw InvalidParameterError("labels must be 0 or 1");
  }
}

RowMatrix ColumnSums(const RowMatrix& m) { return m.colwise().sum(); }

void AddScaled(GcnParams& into, const GcnParams& from, double scale) {
  auto dst = into.Tensors();
  auto src = from.Tensors();
  for (size_t k = 0; k < dst.size(); ++k) *dst[k] += scale * *src[k];
}

}  // namespace

struct GcnInput : InputT<double> {};

PreparedGraph::PreparedGraph(const BipartiteGraph& graph, const FeatureSet& features)
    : input_(std::make_unique<GcnInput>(GcnInput{BuildInput<double>(graph, features)})) {}
PreparedGraph::~PreparedGraph() = default;
PreparedGraph::PreparedGraph(PreparedGraph&&) noexcept = default;
PreparedGraph& PreparedGraph::operator=(PreparedGraph&&) noexcept = default;
int PreparedGraph::num_vars() const { return static_cast<int>(input_->var_features.rows()); }
int PreparedGraph::num_cons() const { return static_cast<int>(input_->cons_features.rows()); }

GcnParams GcnParams::Zeros(const GcnDims& d) {
  if (d.hidden < 1 || d.layers < 0 || d.var_features < 1 || d.cons_features < 1 ||
      d.edge_features < 1) {
    throw InvalidParameterError("invalid GCN dimensions");
  }
  const int h = d.hidden;
  GcnParams p;
  p.dims = d;
  p.embed_v = RowMatrix::Zero(d.var_features, h);
  p.embed_v_bias = RowMatrix::Zero(1, h);
  p.embed_c = RowMatrix::Zero(d.cons_features, h);
  p.embed_c_bias = RowMatrix::Zero(1, h);
  p.layers.resize(d.layers);
  for (GcnLayer& layer : p.layers) {
    layer.msg_vc = RowMatrix::Zero(h + d.edge_features, h);
    layer.msg_vc_bias = RowMatrix::Zero(1, h);
    layer.upd_c = RowMatrix::Zero(2 * h, h);
    layer.upd_c_bias = RowMatrix::Zero(1, h);
    layer.msg_cv = RowMatrix::Zero(h + d.edge_features, h);
    layer.msg_cv_bias = RowMatrix::Zero(1, h);
    layer.upd_v = RowMatrix::Zero(2 * h, h);
    layer.upd_v_bias = RowMatrix::Zero(1, h);
  }
  p.head = RowMatrix::Zero(h, 1);
  p.head_bias = RowMatrix::Zero(1, 1);
  return p;
}

GcnParams GcnParams::Initialize(const GcnDims& dims, uint64_t seed) {
  GcnParams p = Zeros(dims);
  Rng rng(seed);
  for (RowMatrix* t : p.Tensors()) {
    if (t->rows() == 1) {
      // A small positive bias keeps ReLU units off their kink for inputs
      // whose scaled features are all zero.
      if (t != &p.head_bias) t->setConstant(0.01);
      continue;
    }
    const double a = std::sqrt(6.0 / static_cast<double>(t->rows() + t->cols()));
    for (Eigen::Index k = 0; k < t->size(); ++k) t->data()[k] = rng.Uniform(-a, a);
  }
  return p;
}

std::vector<RowMatrix*> GcnParams::Tensors() {
  std::vector<RowMatrix*> out{&embed_v, &embed_v_bias, &embed_c, &embed_c_bias};
  for (GcnLayer& l : layers) {
    for (RowMatrix* t : {&l.msg_vc, &l.msg_vc_bias, &l.upd_c, &l.upd_c_bias, &l.msg_cv,
                         &l.msg_cv_bias, &l.upd_v, &l.upd_v_bias}) {
      out.push_back(t);
    }
  }
  out.push_back(&head);
  out.push_back(&head_bias);
  return out;
}

std::vector<const RowMatrix*> GcnParams::Tensors() const {
  auto mutable_tensors = const_cast<GcnParams*>(this)->Tensors();
  return std::vector<const RowMatrix*>(mutable_tensors.begin(), mutable_tensors.end());
}

std::vector<std::string> GcnParams::TensorNames() const {
  std::vector<std::string> names{"embed_v", "embed_v_bias", "embed_c", "embed_c_bias"};
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (const char* t : {"msg_vc", "msg_vc_bias", "upd_c", "upd_c_bias", "msg_cv",
                          "msg_cv_bias", "upd_v", "upd_v_bias"}) {
      names.push_back(prefix + t);
    }
  }
  names.push_back("head");
  names.push_back("head_bias");
  return names;
}

int64_t GcnParams::NumParameters() const {
  int64_t total = 0;
  for (const RowMatrix* t : Tensors()) total += t->size();
  return total;
}

ProbabilityVector Forward(const GcnParams& params, const PreparedGraph& input) {
  const GcnInput& in = input.input();
  CheckDims(params, in.var_features.cols(), in.cons_features.cols(), in.cons_edge_mean.cols());
  const RowMatrix logits = ForwardLogits<double>(params, in, nullptr);
  ProbabilityVector p(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    p[i] = ClampProbability(Sigmoid(logits(i, 0)));
  }
  return p;
}

ProbabilityVector Forward(const GcnParams& params, const BipartiteGraph& graph,
                          const FeatureSet& features) {
  CheckDims(params, features.var_features.cols(), features.cons_features.cols(),
            features.edge_features.cols());
  return Forward(params, PreparedGraph(graph, features));
}

double Loss(std::span<const double> p, std::span<const int> labels, const ClassWeights& w) {
  return LossT<double>(p, labels, w);
}

LossAndGradient LossGrad(const GcnParams& P, const PreparedGraph& input,
                         std::span<const int> labels, const ClassWeights& w) {
  const GcnInput& in = input.input();
  CheckDims(P, in.var_features.cols(), in.cons_features.cols(), in.cons_edge_mean.cols());
  const int n = input.num_vars();
  CheckLabels(labels, n);
  const int h = P.dims.hidden;
  const int de = P.dims.edge_features;

  ForwardCache<double> cache;
  const RowMatrix logits = ForwardLogits<double>(P, in, &cache);
  std::vector<double> p(n);
  RowMatrix d_logits = RowMatrix::Zero(n, 1);
  for (int i = 0; i < n; ++i) {
    const double s = Sigmoid(logits(i, 0));
    p[i] = ClampProbability(s);
    // d/dz of -[y log s + (1-y) log(1-s)] is s - y; zero where the clamp is active.
    if (s == p[i]) {
      const double weight = labels[i] == 1 ? w.positive : w.negative;
      d_logits(i, 0) = weight * (s - labels[i]) / n;
    }
  }
  LossAndGradient out;
  out.loss = LossT<double>(std::span<const double>(p), labels, w);
  GcnParams& G = out.gradient;
  G = GcnParams::Zeros(P.dims);
  if (n == 0) return out;

  G.head = cache.v_final.transpose() * d_logits;
  G.head_bias(0, 0) = d_logits.sum();
  RowMatrix d_v = d_logits * P.head.transpose();
  RowMatrix d_c = RowMatrix::Zero(in.cons_features.rows(), h);

  for (int l = static_cast<int>(P.layers.size()) - 1; l >= 0; --l) {
    const GcnLayer& layer = P.layers[l];
    const LayerCache<double>& lc = cache.layers[l];
    GcnLayer& gl = G.layers[l];

    // constraints -> variables
    const RowMatrix d_v_pre = d_v.cwiseProduct((lc.v_pre.array() > 0.0).cast<double>().matrix());
    gl.upd_v.topRows(h) = lc.v_in.transpose() * d_v_pre;
    gl.upd_v.bottomRows(h) = lc.agg_v.transpose() * d_v_pre;
    gl.upd_v_bias = ColumnSums(d_v_pre);
    RowMatrix d_v_in = d_v_pre * layer.upd_v.topRows(h).transpose();
    const RowMatrix d_agg_v = d_v_pre * layer.upd_v.bottomRows(h).transpose();
    gl.msg_cv.topRows(h) = lc.mean_c.transpose() * d_agg_v;
    gl.msg_cv.bottomRows(de) = in.var_edge_mean.transpose() * d_agg_v;
    gl.msg_cv_bias = in.var_mask.transpose() * d_agg_v;
    RowMatrix d_c_out = d_c;
    d_c_out += in.var_mean.transpose() * (d_agg_v * layer.msg_cv.topRows(h).transpose());

    // variables -> constraints
    const RowMatrix d_c_pre =
        d_c_out.cwiseProduct((lc.c_pre.array() > 0.0).cast<double>().matrix());
    gl.upd_c.topRows(h) = lc.c_in.transpose() * d_c_pre;
    gl.upd_c.bottomRows(h) = lc.agg_c.transpose() * d_c_pre;
    gl.upd_c_bias = ColumnSums(d_c_pre);
    d_c = d_c_pre * layer.upd_c.topRows(h).transpose();
    const RowMatrix d_agg_c = d_c_pre * layer.upd_c.bottomRows(h).transpose();
    gl.msg_vc.topRows(h) = lc.mean_v.transpose() * d_agg_c;
    gl.msg_vc.bottomRows(de) = in.cons_edge_mean.transpose() * d_agg_c;
    gl.msg_vc_bias = in.cons_mask.transpose() * d_agg_c;
    d_v_in += in.cons_mean.transpose() * (d_agg_c * layer.msg_vc.topRows(h).transpose());
    d_v = std::move(d_v_in);
  }

  const RowMatrix d_v0 = d_v.cwiseProduct((cache.v0_pre.array() > 0.0).cast<double>().matrix());
  G.embed_v = in.var_features.transpose() * d_v0;
  G.embed_v_bias = ColumnSums(d_v0);
  const RowMatrix d_c0 = d_c.cwiseProduct((cache.c0_pre.array() > 0.0).cast<double>().matrix());
  G.embed_c = in.cons_features.transpose() * d_c0;
  G.embed_c_bias = ColumnSums(d_c0);
  return out;
}

LossAndGradient LossGrad(const GcnParams& params, const BipartiteGraph& graph,
                         const FeatureSet& features, std::span<const int> labels,
                         const ClassWeights& weights) {
  CheckDims(params, features.var_features.cols(), features.cons_features.cols(),
            features.edge_features.cols());
  return LossGrad(params, PreparedGraph(graph, features), labels, weights);
}

long double LossExtended(const GcnParams& params, const BipartiteGraph& graph,
                         const FeatureSet& features, std::span<const int> labels,
                         const ClassWeights& weights) {
  CheckDims(params, features.var_features.cols(), features.cons_features.cols(),
            features.edge_features.cols());
  CheckLabels(labels, graph.num_vars);
  const InputT<long double> in = BuildInput<long double>(graph, features);
  const MatT<long double> logits = ForwardLogits<long double>(params, in, nullptr);
  std::vector<long double> p(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) p[i] = Sigmoid(logits(i, 0));
  return LossT<long double>(std::span<const long double>(p), labels, weights);
}

std::vector<double> ReluPreActivations(const GcnParams& params, const BipartiteGraph& graph,
                                       const FeatureSet& features) {
  CheckDims(params, features.var_features.cols(), features.cons_features.cols(),
            features.edge_features.cols());
  const InputT<double> in = BuildInput<double>(graph, features);
  ForwardCache<double> cache;
  ForwardLogits<double>(params, in, &cache);
  std::vector<double> out;
  auto append = [&](const MatT<double>& m) { out.insert(out.end(), m.data(), m.data() + m.size()); };
  append(cache.v0_pre);
  append(cache.c0_pre);
  for (const LayerCache<double>& lc : cache.layers) {
    append(lc.c_pre);
    append(lc.v_pre);
  }
  return out;
}

LossAndGradient BatchLossGrad(const GcnParams& params,
                              std::span<const PreparedGraph* const> inputs,
                              std::span<const std::vector<int>* const> labels,
                              const ClassWeights& weights) {
  if (inputs.size() != labels.size()) throw DimensionError("batch inputs/labels mismatch");
  LossAndGradient total;
  total.gradient = GcnParams::Zeros(params.dims);
  if (inputs.empty()) return total;
  const double scale = 1.0 / static_cast<double>(inputs.size());
  for (size_t k = 0; k < inputs.size(); ++k) {
    LossAndGradient one = LossGrad(params, *inputs[k], *labels[k], weights);
    total.loss += scale * one.loss;
    AddScaled(total.gradient, one.gradient, scale);
  }
  return total;
}

TrainResult Train(std::span<const LabeledExample> dataset, const TrainConfig& config) {
  if (dataset.empty()) throw InvalidParameterError("training dataset is empty");
  if (config.epochs < 0 || !(config.learning_rate > 0.0) || config.momentum < 0.0 ||
      config.momentum >= 1.0 || config.validation_fraction < 0.0 ||
      config.validation_fraction >= 1.0) {
    throw InvalidParameterError("invalid training configuration");
  }
  GcnDims dims;
  dims.hidden = config.hidden;
  dims.layers = config.layers;

  std::vector<PreparedGraph> inputs;
  inputs.reserve(dataset.size());
  for (const LabeledExample& ex : dataset) {
    CheckLabels(ex.labels, ex.instance.num_vars());
    const BipartiteGraph g = BuildBigraph(ex.instance);
    inputs.emplace_back(g, ExtractFeatures(ex.instance, g));
  }

  std::vector<int> order(dataset.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  Rng rng(config.seed);
  rng.Shuffle(order);
  const int n_val = static_cast<int>(config.validation_fraction * static_cast<double>(dataset.size()));
  const int n_train = static_cast<int>(dataset.size()) - n_val;

  TrainResult result;
  std::vector<const PreparedGraph*> train_in, val_in;
  std::vector<const std::vector<int>*> train_y, val_y;
  for (int k = 0; k < static_cast<int>(order.size()); ++k) {
    const int idx = order[k];
    if (k < n_train) {
      train_in.push_back(&inputs[idx]);
      train_y.push_back(&dataset[idx].labels);
    } else {
      val_in.push_back(&inputs[idx]);
      val_y.push_back(&dataset[idx].labels);
      result.validation_indices.push_back(idx);
    }
  }

  ClassWeights weights;
  if (config.balance_classes) {
    double ones = 0, total = 0;
    for (const auto* y : train_y) {
      for (int v : *y) ones += v;
      total += static_cast<double>(y->size());
    }
    if (ones > 0 && ones < total) {
      weights.positive = total / (2.0 * ones);
      weights.negative = total / (2.0 * (total - ones));
    }
  }

  auto validate = [&](const GcnParams& params, double* loss, double* accuracy) {
    double loss_sum = 0.0, correct = 0.0, count = 0.0;
    for (size_t k = 0; k < val_in.size(); ++k) {
      const ProbabilityVector p = Forward(params, *val_in[k]);
      loss_sum += Loss(p, *val_y[k]);
      for (size_t i = 0; i < p.size(); ++i) {
        correct += (p[i] >= 0.5 ? 1 : 0) == (*val_y[k])[i] ? 1.0 : 0.0;
      }
      count += static_cast<double>(p.size());
    }
    *loss = val_in.empty() ? 0.0 : loss_sum / static_cast<double>(val_in.size());
    *accuracy = count > 0 ? correct / count : 0.0;
  };

  result.train_size = n_train;
  result.validation_size = n_val;
  GcnParams params = GcnParams::Initialize(dims, config.seed);
  GcnParams velocity = GcnParams::Zeros(dims);
  double best = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch <= config.epochs; ++epoch) {
    LossAndGradient lg = BatchLossGrad(params, train_in, train_y, weights);
    EpochLog row;
    row.epoch = epoch;
    row.train_loss = lg.loss;
    validate(params, &row.val_loss, &row.val_accuracy);
    if (!std::isfinite(row.train_loss) || !std::isfinite(row.val_loss)) {
      throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                              " (loss is not finite)",
                          epoch);
    }
    result.log.push_back(row);
    const double score = val_in.empty() ? row.train_loss : row.val_loss;
    if (score < best) {
      best = score;
      result.params = params;
      result.best_epoch = epoch;
    }
    if (epoch == config.epochs) break;
    auto v = velocity.Tensors();
    auto g = lg.gradient.Tensors();
    auto theta = params.Tensors();
    for (size_t k = 0; k < v.size(); ++k) {
      *v[k] = config.momentum * *v[k] + *g[k];
      *theta[k] -= config.learning_rate * *v[k];
    }
  }
  return result;
}

void WriteTrainingLogCsv(std::span<const EpochLog> log, std::ostream& out) {
  out << "epoch,train_loss,val_loss,val_accuracy\n";
  for (const EpochLog& row : log) {
    out << row.epoch << ',' << FormatDouble(row.train_loss) << ',' << FormatDouble(row.val_loss)
        << ',' << FormatDouble(row.val_accuracy) << '\n';
  }
}

ProbabilityVector Predict(const GcnParams& params, const MipInstance& instance) {
  const BipartiteGraph g = BuildBigraph(instance);
  return Forward(params, g, ExtractFeatures(instance, g));
}

std::vector<int> RoundProbabilities(std::span<const double> p) {
  std::vector<int> x(p.size());
  for (size_t i = 0; i < p.size(); ++i) x[i] = p[i] >= 0.5 ? 1 : 0;
  return x;
}

namespace {

constexpr char kMagic[] = "BPGCN1";
constexpr size_t kMagicSize = 6;

void PutU32(std::string& out, uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void PutF64(std::string& out, double value) {
  const uint64_t bits = std::bit_cast<uint64_t>(value);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}
  uint64_t Take(int width) {
    if (pos_ + width > bytes_.size()) throw IoError("weight file is truncated");
    uint64_t v = 0;
    for (int k = 0; k < width; ++k) {
      v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    }
    pos_ += width;
    return v;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  size_t pos_ = kMagicSize;
};

}  // namespace

std::string SerializeParams(const GcnParams& params) {
  std::string out(kMagic, kMagicSize);
  const GcnDims& d = params.dims;
  for (int v : {d.var_features, d.cons_features, d.edge_features, d.hidden, d.layers}) {
    PutU32(out, static_cast<uint32_t>(v));
  }
  for (const RowMatrix* t : params.Tensors()) {
    for (Eigen::Index k = 0; k < t->size(); ++k) PutF64(out, t->data()[k]);
  }
  return out;
}

GcnParams DeserializeParams(std::string_view bytes) {
  if (bytes.size() < kMagicSize || bytes.substr(0, kMagicSize) != std::string_view(kMagic, kMagicSize)) {
    throw IoError("not a BPGCN1 weight file");
  }
  ByteReader reader(bytes);
  GcnDims d;
  d.var_features = static_cast<int>(reader.Take(4));
  d.cons_features = static_cast<int>(reader.Take(4));
  d.edge_features = static_cast<int>(reader.Take(4));
  d.hidden = static_cast<int>(reader.Take(4));
  d.layers = static_cast<int>(reader.Take(4));
  if (d.hidden > 4096 || d.layers > 4096 || d.var_features > 4096 || d.cons_features > 4096 ||
      d.edge_features > 4096) {
    throw IoError("implausible dimensions in weight file");
  }
  GcnParams p = GcnParams::Zeros(d);
  for (RowMatrix* t : p.Tensors()) {
    for (Eigen::Index k = 0; k < t->size(); ++k) {
      t->data()[k] = std::bit_cast<double>(reader.Take(8));
    }
  }
  if (!reader.AtEnd()) throw IoError("trailing bytes in weight file");
  return p;
}

void SaveParams(const GcnParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const std::string bytes = SerializeParams(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

GcnParams LoadParams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return DeserializeParams(buffer.str());
}

}  // namespace bprb
