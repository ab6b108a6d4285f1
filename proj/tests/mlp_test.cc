//
// Copyright 2026 The deepcand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "deepcand/mlp.h"

#include <cmath>
#include <numeric>

#include "deepcand/status_macros.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace deepcand {
namespace {

using ::deepcand::testing::GaussianMatrix;
using ::deepcand::testing::Rows;

TEST(MlpTest, ShapesChain) {
  SeededRng rng(1, "mlp");
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::FourLayer(6, 3, rng, 5));
  EXPECT_EQ(m.dims(), (std::vector<size_t>{6, 5, 5, 5, 3}));
  EXPECT_EQ(m.num_layers(), 4u);
  EXPECT_EQ(m.num_parameters(), 6 * 5 + 5 + 2 * (5 * 5 + 5) + 5 * 3 + 3);
  ASSERT_OK_AND_ASSIGN(Mlp d, Mlp::FourLayer(7, 2, rng));
  EXPECT_EQ(d.dims(), (std::vector<size_t>{7, 7, 7, 7, 2}));
  EXPECT_FALSE(Mlp::Zeros({4}).ok());
  EXPECT_FALSE(Mlp::Zeros({4, 0, 2}).ok());
}

TEST(MlpTest, ZeroModelGivesUniformSoftmax) {
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::Zeros({3, 4, 4, 4, 5}));
  const EmbeddingMatrix x = Rows({{1, 2, 3}, {-1, 0, 4}});
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix logits, Predict(m, x));
  for (double v : logits.values()) EXPECT_EQ(v, 0.0);
  const std::vector<int> targets = {0, 3};
  ASSERT_OK_AND_ASSIGN(double loss, MeanCrossEntropy(m, x, targets));
  EXPECT_NEAR(loss, std::log(5.0), 1e-12);
}

TEST(MlpTest, ZeroModelBiasGradientIsSoftmaxMinusOnehot) {
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::Zeros({2, 3, 3, 3, 2}));
  const EmbeddingMatrix x = Rows({{1, 2}, {3, 4}});
  const std::vector<int> targets = {0, 1};
  ASSERT_OK_AND_ASSIGN(ForwardCache cache, Forward(m, x));
  ASSERT_OK_AND_ASSIGN(std::vector<double> g, Backward(m, cache, targets));
  // Averaged (p - y): ((0.5-1) + 0.5) / 2 = 0 for both classes.
  const size_t b = m.bias_offset(3);
  EXPECT_NEAR(g[b], 0.0, 1e-15);
  EXPECT_NEAR(g[b + 1], 0.0, 1e-15);
  const std::vector<int> both_zero = {0, 0};
  ASSERT_OK_AND_ASSIGN(g, Backward(m, cache, both_zero));
  EXPECT_NEAR(g[b], -0.5, 1e-15);
  EXPECT_NEAR(g[b + 1], 0.5, 1e-15);
}

TEST(MlpTest, IdentityReproducesInput) {
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::Identity(3));
  const EmbeddingMatrix x = Rows({{1.5, -2, 0}, {-0.25, 7, 3}});
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix y, Predict(m, x));
  EXPECT_EQ(y, x);
}

TEST(MlpTest, GoldenOutputIsStable) {
  SeededRng rng(2026, "golden");
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::FourLayer(3, 2, rng, 4));
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix y, Predict(m, Rows({{0.5, -1, 2}})));
  EXPECT_NEAR(y(0, 0), 0.1788834829575493, 1e-12);
  EXPECT_NEAR(y(0, 1), 0.020356706176053944, 1e-12);
}

TEST(MlpTest, RejectsBadInput) {
  SeededRng rng(3, "mlp");
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::FourLayer(3, 2, rng, 4));
  EXPECT_FALSE(Predict(m, Rows({{1, 2}})).ok());
  const std::vector<int> bad = {2};
  EXPECT_FALSE(MeanCrossEntropy(m, Rows({{1, 2, 3}}), bad).ok());
}

TEST(SoftmaxTest, SumsToOne) {
  const std::vector<double> p = Softmax(std::vector<double>{1000, 0, -3, 7});
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  SeededRng rng(4, "ce");
  const EmbeddingMatrix logits = GaussianMatrix(rng, 8, 5, 3.0);
  std::vector<int> targets(8);
  for (int& t : targets) t = static_cast<int>(rng.UniformIndex(5));
  ASSERT_OK_AND_ASSIGN(CrossEntropy ce, SoftmaxCrossEntropy(logits, targets));
  EXPECT_GE(ce.loss, 0.0);
}

TEST(GradientCheckTest, RandomTinyModels) {
  SeededRng rng(5, "gradcheck");
  for (int trial = 0; trial < 10; ++trial) {
    const size_t in = 2 + rng.UniformIndex(4);
    const size_t out = 2 + rng.UniformIndex(3);
    ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::FourLayer(in, out, rng, 3 + trial % 3));
    const EmbeddingMatrix x = GaussianMatrix(rng, 4, in);
    std::vector<int> targets(4);
    for (int& t : targets) t = static_cast<int>(rng.UniformIndex(out));
    ASSERT_OK_AND_ASSIGN(double err, GradientCheck(m, x, targets, 1e-5));
    EXPECT_LE(err, 1e-4) << trial;
  }
}

TEST(GradientCheckTest, SingleExampleIsUnaveraged) {
  SeededRng rng(6, "single");
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::FourLayer(3, 2, rng, 3));
  const EmbeddingMatrix x = Rows({{0.3, -0.2, 1.0}});
  const std::vector<int> t = {1};
  ASSERT_OK_AND_ASSIGN(ForwardCache cache, Forward(m, x));
  ASSERT_OK_AND_ASSIGN(std::vector<double> g, Backward(m, cache, t));
  const std::vector<double> p = Softmax(cache.output().row(0));
  const size_t b = m.bias_offset(3);
  EXPECT_NEAR(g[b], p[0], 1e-15);
  EXPECT_NEAR(g[b + 1], p[1] - 1.0, 1e-15);
}

TEST(GradientCheckTest, ZeroDirectionAndNegativeControl) {
  const std::vector<double> theta = {1.0, 2.0};
  auto loss = [](std::span<const double> t) { return t[0] * t[0]; };
  // theta[1] does not enter the loss: both gradients are exactly 0.
  EXPECT_EQ(GradientRelativeError(0.0, 0.0), 0.0);
  EXPECT_LT(GradientCheck(loss, theta, std::vector<double>{2.0, 0.0}, 1e-5),
            1e-9);
  // Deliberately wrong analytic gradient (sign flipped on one coordinate).
  EXPECT_GT(GradientCheck(loss, theta, std::vector<double>{-2.0, 0.0}, 1e-5),
            1e-2);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  SeededRng rng(7, "adam");
  ASSERT_OK_AND_ASSIGN(Mlp m, Mlp::FourLayer(3, 2, rng, 3));
  const std::vector<double> before(m.parameters().begin(),
                                   m.parameters().end());
  AdamState state = AdamState::Create(m.num_parameters());
  ASSERT_OK(AdamStep(m, std::vector<double>(m.num_parameters(), 0.0), state));
  EXPECT_TRUE(std::equal(before.begin(), before.end(), m.parameters().begin()));
  EXPECT_EQ(state.step, 1u);
}

TEST(AdamTest, FirstStepClosedForm) {
  std::vector<double> theta = {1.0, -1.0, 0.5};
  const std::vector<double> g = {0.3, -2.0, 1e-3};
  AdamState state = AdamState::Create(3);
  const ParameterBlock block{theta, g};
  ASSERT_OK(AdamStep(std::span<const ParameterBlock>(&block, 1), state));
  // Bias correction at t=1 leaves m_hat = g, v_hat = g^2.
  const double lr = 1e-3, eps = 1e-8;
  EXPECT_NEAR(theta[0], 1.0 - lr * 0.3 / (0.3 + eps), 1e-15);
  EXPECT_NEAR(theta[1], -1.0 + lr * 2.0 / (2.0 + eps), 1e-15);
  EXPECT_NEAR(theta[2], 0.5 - lr * 1e-3 / (1e-3 + eps), 1e-15);
}

TEST(AdamTest, SharedStateAdvancesOnce) {
  std::vector<double> a = {1.0}, b = {2.0};
  const std::vector<double> ga = {1.0}, gb = {1.0};
  AdamState state = AdamState::Create(2);
  const ParameterBlock blocks[] = {{a, ga}, {b, gb}};
  ASSERT_OK(AdamStep(blocks, state));
  EXPECT_EQ(state.step, 1u);
  EXPECT_NEAR(a[0], 1.0 - 1e-3, 1e-10);
  EXPECT_NEAR(b[0], 2.0 - 1e-3, 1e-10);
  AdamState small = AdamState::Create(1);
  EXPECT_FALSE(AdamStep(blocks, small).ok());
}

TEST(AdamTest, TrainingIsDeterministicAndReducesLoss) {
  auto run = [](std::vector<double>* losses) -> absl::Status {
    SeededRng rng(8, "train");
    DEEPCAND_ASSIGN_OR_RETURN(Mlp m, Mlp::FourLayer(2, 2, rng, 8));
    EmbeddingMatrix x(64, 2);
    std::vector<int> y(64);
    for (size_t i = 0; i < 64; ++i) {
      y[i] = i % 2;
      x(i, 0) = (y[i] ? 2.0 : -2.0) + 0.3 * rng.Gaussian();
      x(i, 1) = rng.Gaussian();
    }
    AdamState state = AdamState::Create(m.num_parameters());
    for (int step = 0; step < 50; ++step) {
      DEEPCAND_ASSIGN_OR_RETURN(ForwardCache cache, Forward(m, x));
      DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> g, Backward(m, cache, y));
      DEEPCAND_ASSIGN_OR_RETURN(double loss, MeanCrossEntropy(m, x, y));
      losses->push_back(loss);
      DEEPCAND_RETURN_IF_ERROR(AdamStep(m, g, state));
    }
    return absl::OkStatus();
  };
  std::vector<double> a, b;
  ASSERT_OK(run(&a));
  ASSERT_OK(run(&b));
  EXPECT_EQ(a, b);
  EXPECT_LT(a.back(), a.front());
}

}  // namespace
}  // namespace deepcand
