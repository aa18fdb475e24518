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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "bprb/error.h"
#include "bprb/instance_gen.h"
#include "oracles.h"

namespace bprb {
namespace {

GcnDims SmallDims() {
  GcnDims d;
  d.hidden = 6;
  d.layers = 2;
  return d;
}

TEST(ForwardTest, ZeroParametersGiveOneHalf) {
  const MipInstance inst = GenerateFamilyInstance(Family::kVertexCover, FamilyScale{}, 1);
  const ProbabilityVector p = Predict(GcnParams::Zeros(GcnDims{}), inst);
  ASSERT_EQ(static_cast<int>(p.size()), inst.num_vars());
  for (double v : p) EXPECT_EQ(v, 0.5);
}

TEST(ForwardTest, IsolatedVariableIsDeterministicAndOpen) {
  const MipInstance inst = MipInstance::Binary("iso", Sense::kMinimize, {1.0, 2.0},
                                               {Row{{{1, 1.0}}, 1.0}});
  const GcnParams params = GcnParams::Initialize(GcnDims{}, 4);
  const ProbabilityVector a = Predict(params, inst);
  const ProbabilityVector b = Predict(params, inst);
  EXPECT_EQ(a, b);
  EXPECT_GT(a[0], 0.0);
  EXPECT_LT(a[0], 1.0);
}

TEST(ForwardTest, PermutationEquivariance) {
  std::mt19937_64 rng(21);
  const GcnParams params = GcnParams::Initialize(GcnDims{}, 2);
  for (int t = 0; t < 10; ++t) {
    const MipInstance inst = testing::RandomBinaryInstance(rng, 12, 8);
    std::vector<int> perm(inst.num_vars()), row_perm(inst.num_rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::iota(row_perm.begin(), row_perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::shuffle(row_perm.begin(), row_perm.end(), rng);
    const ProbabilityVector p = Predict(params, inst);
    const ProbabilityVector q = Predict(params, testing::Permuted(inst, perm, row_perm));
    for (int j = 0; j < inst.num_vars(); ++j) EXPECT_NEAR(p[j], q[perm[j]], 1e-9);
  }
}

TEST(ForwardTest, ShapeMismatchThrows) {
  const MipInstance inst = GenerateFamilyInstance(Family::kVertexCover, FamilyScale{}, 1);
  const BipartiteGraph g = BuildBigraph(inst);
  FeatureSet f = ExtractFeatures(inst, g);
  f.var_features.conservativeResize(Eigen::NoChange, 3);
  EXPECT_THROW(Forward(GcnParams::Initialize(GcnDims{}, 1), g, f), DimensionError);
}

TEST(ForwardTest, SameParamsAcceptDifferentSizes) {
  const GcnParams params = GcnParams::Initialize(GcnDims{}, 3);
  FamilyScale small, large;
  small.n_nodes = 50;
  large.n_nodes = 300;
  EXPECT_EQ(Predict(params, GenerateFamilyInstance(Family::kVertexCover, small, 1)).size(), 50u);
  EXPECT_EQ(Predict(params, GenerateFamilyInstance(Family::kVertexCover, large, 1)).size(),
            300u);
}

TEST(LossTest, ClosedForms) {
  const std::vector<double> half = {0.5, 0.5};
  const std::vector<int> y01 = {0, 1};
  EXPECT_NEAR(Loss(half, y01), std::log(2.0), 1e-15);
  const std::vector<double> p = {0.9, 0.2};
  const std::vector<int> y = {1, 0};
  EXPECT_NEAR(Loss(p, y), -(std::log(0.9) + std::log(0.8)) / 2.0, 1e-15);
  EXPECT_NEAR(Loss(p, y), 0.1642520335, 1e-9);
  const std::vector<double> perfect = {1.0 - kProbabilityEpsilon, kProbabilityEpsilon};
  EXPECT_LE(Loss(perfect, y), -std::log(1.0 - kProbabilityEpsilon) + 1e-15);
  const std::vector<int> short_labels = {1};
  EXPECT_THROW(Loss(p, short_labels), DimensionError);
}

TEST(LossTest, ClassWeightsScaleTerms) {
  const std::vector<double> p = {0.9, 0.2};
  const std::vector<int> y = {1, 0};
  const double unweighted = Loss(p, y);
  const double weighted = Loss(p, y, ClassWeights{2.0, 2.0});
  EXPECT_NEAR(weighted, 2.0 * unweighted, 1e-15);
}

TEST(GradientTest, MatchesFiniteDifferencesOnSmallInstance) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 3; ++t) {
    const MipInstance inst = testing::RandomBinaryInstance(rng, 6, 5, 0.6);
    std::vector<int> labels(6);
    for (int& y : labels) y = static_cast<int>(rng() % 2);
    const GcnParams params = GcnParams::Initialize(SmallDims(), 10 + t);
    const testing::GradCheckResult r = testing::CheckGradient(params, inst, labels);
    EXPECT_EQ(r.failures, 0) << r.worst_entry;
    EXPECT_EQ(r.kink_skipped, 0);
    EXPECT_EQ(r.checked, params.NumParameters());
  }
}

TEST(GradientTest, HeadBiasAtZeroPoint) {
  std::mt19937_64 rng(1);
  const MipInstance inst = testing::RandomBinaryInstance(rng, 5, 3);
  const std::vector<int> zeros(5, 0);
  const GcnParams params = GcnParams::Zeros(GcnDims{});
  const BipartiteGraph g = BuildBigraph(inst);
  const LossAndGradient lg = LossGrad(params, g, ExtractFeatures(inst, g), zeros);
  EXPECT_NEAR(lg.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(lg.gradient.head_bias(0, 0), 0.5, 1e-15);
  EXPECT_EQ(lg.gradient.head.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GradientTest, DuplicateExampleInBatchKeepsGradient) {
  std::mt19937_64 rng(4);
  const MipInstance inst = testing::RandomBinaryInstance(rng, 7, 5);
  const std::vector<int> labels = {1, 0, 1, 1, 0, 0, 1};
  const GcnParams params = GcnParams::Initialize(SmallDims(), 8);
  const BipartiteGraph g = BuildBigraph(inst);
  const PreparedGraph prepared(g, ExtractFeatures(inst, g));
  const LossAndGradient single = LossGrad(params, prepared, labels);
  const PreparedGraph* inputs[] = {&prepared, &prepared};
  const std::vector<int>* label_ptrs[] = {&labels, &labels};
  const LossAndGradient batch = BatchLossGrad(params, inputs, label_ptrs);
  EXPECT_NEAR(batch.loss, single.loss, 1e-15);
  const auto a = single.gradient.Tensors();
  const auto b = batch.gradient.Tensors();
  for (size_t t = 0; t < a.size(); ++t) {
    EXPECT_LT((*a[t] - *b[t]).cwiseAbs().maxCoeff(), 1e-15);
  }
}

std::vector<LabeledExample> TinyDataset(int count) {
  std::vector<LabeledExample> data;
  FamilyScale scale;
  scale.n_nodes = 20;
  for (int s = 0; s < count; ++s) {
    const MipInstance inst = GenerateFamilyInstance(Family::kVertexCover, scale, s);
    const testing::BruteOptimum best = testing::BruteForceOptimum(inst);
    data.push_back({inst, best.x});
  }
  return data;
}

TEST(TrainTest, OverfitsSingleInstance) {
  const std::vector<LabeledExample> data = TinyDataset(1);
  TrainConfig config;
  config.epochs = 200;
  config.validation_fraction = 0.0;
  const TrainResult r = Train(data, config);
  ASSERT_EQ(r.log.size(), 201u);
  EXPECT_LT(r.log.back().train_loss, r.log.front().train_loss);
  EXPECT_EQ(r.train_size, 1);
}

TEST(TrainTest, DeterministicInSeed) {
  const std::vector<LabeledExample> data = TinyDataset(5);
  TrainConfig config;
  config.epochs = 15;
  config.seed = 3;
  const TrainResult a = Train(data, config);
  const TrainResult b = Train(data, config);
  EXPECT_EQ(SerializeParams(a.params), SerializeParams(b.params));
  EXPECT_EQ(a.train_size + a.validation_size, 5);
  EXPECT_EQ(a.validation_size, 1);
}

TEST(TrainTest, PaperSizedConfigIsAccepted) {
  const std::vector<LabeledExample> data = TinyDataset(2);
  TrainConfig config;
  config.hidden = 32;
  config.layers = 20;
  config.epochs = 1;
  const TrainResult r = Train(data, config);
  EXPECT_EQ(r.params.dims.layers, 20);
  EXPECT_EQ(r.params.dims.hidden, 32);
}

TEST(TrainTest, Errors) {
  EXPECT_THROW(Train({}, TrainConfig{}), InvalidParameterError);
  const std::vector<LabeledExample> data = TinyDataset(2);
  TrainConfig wild;
  wild.learning_rate = 1e300;
  wild.epochs = 50;
  try {
    Train(data, wild);
    FAIL() << "divergent training did not throw";
  } catch (const TrainingError& e) {
    EXPECT_GE(e.epoch(), 1);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(TrainTest, LogCsvHeader) {
  std::ostringstream out;
  const std::vector<EpochLog> log = {{0, 0.7, 0.69, 0.5}};
  WriteTrainingLogCsv(log, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "epoch,train_loss,val_loss,val_accuracy");
}

TEST(PredictTest, RoundingBoundary) {
  const std::vector<double> p = {0.5, 0.4999999, 0.9};
  EXPECT_EQ(RoundProbabilities(p), (std::vector<int>{1, 0, 1}));
}

TEST(SerializationTest, BitExactRoundTrip) {
  const GcnParams params = GcnParams::Initialize(SmallDims(), 17);
  const std::string bytes = SerializeParams(params);
  EXPECT_EQ(bytes.substr(0, 6), "BPGCN1");
  const GcnParams back = DeserializeParams(bytes);
  EXPECT_EQ(back.dims, params.dims);
  EXPECT_EQ(SerializeParams(back), bytes);
  const auto a = params.Tensors();
  const auto b = back.Tensors();
  for (size_t t = 0; t < a.size(); ++t) EXPECT_EQ(*a[t], *b[t]);
  EXPECT_EQ(static_cast<int64_t>(bytes.size()), 6 + 5 * 4 + 8 * params.NumParameters());
}

TEST(SerializationTest, RejectsCorruptFiles) {
  const std::string bytes = SerializeParams(GcnParams::Initialize(SmallDims(), 1));
  EXPECT_THROW(DeserializeParams("XPGCN1" + bytes.substr(6)), Error);
  EXPECT_THROW(DeserializeParams(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(DeserializeParams(bytes + "x"), Error);
  EXPECT_THROW(LoadParams("/nonexistent/weights.bin"), IoError);
}

}  // namespace
}  // namespace bprb
