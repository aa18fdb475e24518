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

#ifndef BPRB_GCN_H_
#define BPRB_GCN_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bprb/bigraph.h"
#include "bprb/mip.h"

namespace bprb {

// Probabilities are clamped to [eps, 1 - eps] so the loss stays finite.
inline constexpr double kProbabilityEpsilon = 1e-7;

// Per-variable probability of taking value 1 in an optimal solution.
using ProbabilityVector = std::vector<double>;

struct GcnDims {
  int var_features = kVarFeatures;
  int cons_features = kConsFeatures;
  int edge_features = kEdgeFeatures;
  int hidden = 16;
  int layers = 4;
  bool operator==(const GcnDims&) const = default;
};

// One variable->constraint and one constraint->variable half layer. Message
// matrices map [embedding | edge feature] to the hidden width; update
// matrices map [old embedding | aggregated message] to the hidden width.
// Biases are 1 x hidden row vectors.
struct GcnLayer {
  RowMatrix msg_vc, msg_vc_bias;
  RowMatrix upd_c, upd_c_bias;
  RowMatrix msg_cv, msg_cv_bias;
  RowMatrix upd_v, upd_v_bias;
};

struct GcnParams {
  GcnDims dims;
  RowMatrix embed_v, embed_v_bias;
  RowMatrix embed_c, embed_c_bias;
  std::vector<GcnLayer> layers;
  RowMatrix head;       // hidden x 1
  RowMatrix head_bias;  // 1 x 1

  static GcnParams Zeros(const GcnDims& dims);
  // Glorot-uniform weights, hidden biases 0.01, output bias 0.
  static GcnParams Initialize(const GcnDims& dims, uint64_t seed);

  // Every tensor in declaration order: embed_v, embed_v_bias, embed_c,
  // embed_c_bias, then per layer msg_vc, msg_vc_bias, upd_c, upd_c_bias,
  // msg_cv, msg_cv_bias, upd_v, upd_v_bias, then head, head_bias.
  std::vector<RowMatrix*> Tensors();
  std::vector<const RowMatrix*> Tensors() const;
  std::vector<std::string> TensorNames() const;
  int64_t NumParameters() const;
};

// Graph and features bundled with the sparse mean-aggregation operators,
// so repeated passes over the same instance skip the setup.
struct GcnInput;

class PreparedGraph {
 public:
  PreparedGraph(const BipartiteGraph& graph, const FeatureSet& features);
  ~PreparedGraph();
  PreparedGraph(PreparedGraph&&) noexcept;
  PreparedGraph& operator=(PreparedGraph&&) noexcept;

  int num_vars() const;
  int num_cons() const;
  const GcnInput& input() const { return *input_; }

 private:
  std::unique_ptr<GcnInput> input_;
};

// Mean-reduced cross entropy, natural log. Optional class weights scale the
// terms of label-0 and label-1 variables.
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
};

ProbabilityVector Forward(const GcnParams& params, const BipartiteGraph& graph,
                          const FeatureSet& features);
ProbabilityVector Forward(const GcnParams& params, const PreparedGraph& input);

double Loss(std::span<const double> p, std::span<const int> labels,
            const ClassWeights& weights = {});

struct LossAndGradient {
  double loss = 0.0;
  GcnParams gradient;
};

// Exact reverse-mode gradient of Loss(Forward(params, ...), labels).
LossAndGradient LossGrad(const GcnParams& params, const BipartiteGraph& graph,
                         const FeatureSet& features, std::span<const int> labels,
                         const ClassWeights& weights = {});
LossAndGradient LossGrad(const GcnParams& params, const PreparedGraph& input,
                         std::span<const int> labels, const ClassWeights& weights = {});

// The same loss evaluated entirely in extended precision. Used for finite
// difference checks of LossGrad.
long double LossExtended(const GcnParams& params, const BipartiteGraph& graph,
                         const FeatureSet& features, std::span<const int> labels,
                         const ClassWeights& weights = {});

// Every ReLU input of the network (embeddings, then each layer's constraint
// and variable updates), flattened. Lets gradient checks tell when a
// perturbation crosses a kink.
std::vector<double> ReluPreActivations(const GcnParams& params, const BipartiteGraph& graph,
                                       const FeatureSet& features);

struct LabeledExample {
  MipInstance instance;
  std::vector<int> labels;
};

// Mean over examples of the per-example loss and gradient.
LossAndGradient BatchLossGrad(const GcnParams& params,
                              std::span<const PreparedGraph* const> inputs,
                              std::span<const std::vector<int>* const> labels,
                              const ClassWeights& weights = {});

struct TrainConfig {
  int hidden = 16;
  int layers = 4;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  int epochs = 300;
  uint64_t seed = 0;
  // Share of the (seed-shuffled) dataset held out for validation.
  double validation_fraction = 0.2;
  // Weight each class by N / (2 N_class) on the training labels.
  bool balance_classes = false;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  GcnParams params;  // best validation loss seen
  std::vector<EpochLog> log;
  int best_epoch = 0;
  int train_size = 0;
  int validation_size = 0;
  std::vector<int> validation_indices;  // into the dataset, in split order
};

// Full-batch gradient descent with momentum. Log row e describes the
// parameters after e updates; row 0 is the initialization.
TrainResult Train(std::span<const LabeledExample> dataset, const TrainConfig& config);

void WriteTrainingLogCsv(std::span<const EpochLog> log, std::ostream& out);

// BuildBigraph -> ExtractFeatures -> Forward.
ProbabilityVector Predict(const GcnParams& params, const MipInstance& instance);

// x_i = 1 iff p_i >= 0.5.
std::vector<int> RoundProbabilities(std::span<const double> p);

// "BPGCN1", then d_v, d_c, d_e, hidden, layers as little-endian uint32, then
// every tensor of Tensors() in row-major order as little-endian float64.
std::string SerializeParams(const GcnParams& params);
GcnParams DeserializeParams(std::string_view bytes);
void SaveParams(const GcnParams& params, const std::string& path);
GcnParams LoadParams(const std::string& path);

}  // namespace bprb

#endif  // BPRB_GCN_H_
