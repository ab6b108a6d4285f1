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

#include "deepcand/baselines.h"

#include <cmath>
#include <numeric>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace deepcand {
namespace {

using ::deepcand::testing::GaussianMatrix;
using ::deepcand::testing::Rows;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

PrivacyBudget Eps(double e) { return *PrivacyBudget::Create(e); }

TEST(QuantileTest, InterpolatesLinearly) {
  const std::vector<double> v = {0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_DOUBLE_EQ(Quantile(v, 0.125), 0.875);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.875), 6.125);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(Quantile(v, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(Quantile(std::vector<double>{3.5}, 0.3), 3.5);
}

TEST(FitBoxTest, CentralQuantilesPerColumn) {
  EmbeddingMatrix docs(8, 2);
  for (size_t i = 0; i < 8; ++i) {
    docs(i, 0) = static_cast<double>(7 - i);
    docs(i, 1) = 10.0 * static_cast<double>(i);
  }
  ASSERT_OK_AND_ASSIGN(TruncationBox box, FitBox(docs, 0.75));
  EXPECT_THAT(box.lower, ElementsAre(0.875, 8.75));
  EXPECT_THAT(box.upper, ElementsAre(6.125, 61.25));
  EXPECT_THAT(box.widths(), ElementsAre(5.25, 52.5));
  EXPECT_DOUBLE_EQ(box.max_width(), 52.5);
  EXPECT_THAT(box.center(), ElementsAre(3.5, 35.0));
}

TEST(FitBoxTest, RejectsBadInput) {
  EXPECT_FALSE(FitBox(EmbeddingMatrix(0, 3)).ok());
  EXPECT_FALSE(FitBox(Rows({{1.0}}), 1.5).ok());
  EXPECT_FALSE(FitBox(Rows({{1.0}}), 0.0).ok());
}

TEST(ClipTest, ClipIsIdempotent) {
  const TruncationBox box{{-1, 0}, {1, 2}};
  SeededRng rng(1, "clip");
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v = {3 * rng.Gaussian(), 3 * rng.Gaussian()};
    ClipToBox(box, v);
    const std::vector<double> once = v;
    ClipToBox(box, v);
    EXPECT_EQ(v, once);
    EXPECT_GE(v[0], -1.0);
    EXPECT_LE(v[1], 2.0);
  }
}

TEST(ClipTest, ClippedMeanClipsSentencesFirst) {
  const TruncationBox box{{0, 0}, {1, 1}};
  ASSERT_OK_AND_ASSIGN(std::vector<double> mean,
                       ClippedMean(Rows({{100, 0.5}, {0, 0.5}}), box));
  EXPECT_THAT(mean, ElementsAre(0.5, 0.5));
}

TEST(ClipTest, ClippedMeansSplitsDocuments) {
  const TruncationBox box{{-10}, {10}};
  const EmbeddingMatrix s = Rows({{1}, {3}, {5}, {20}});
  const std::vector<size_t> starts = {0, 2};
  const std::vector<size_t> counts = {2, 2};
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix out,
                       ClippedMeans(s, starts, counts, box));
  EXPECT_DOUBLE_EQ(out(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(out(1, 0), 7.5);
}

TEST(TruncationTest, NoiseScales) {
  const TruncationBox box{{0, 0}, {2, 4}};
  EXPECT_THAT(TruncationNoiseScales(box, 4, Eps(1), WidthMode::kPerDimension),
              ElementsAre(1.0, 2.0));
  EXPECT_THAT(TruncationNoiseScales(box, 4, Eps(1), WidthMode::kMax),
              ElementsAre(2.0, 2.0));
  EXPECT_THAT(TruncationNoiseScales(box, 8, Eps(2), WidthMode::kPerDimension),
              ElementsAre(0.25, 0.5));
}

TEST(TruncationTest, ParseWidthMode) {
  EXPECT_EQ(*ParseWidthMode("per-dim"), WidthMode::kPerDimension);
  EXPECT_EQ(*ParseWidthMode("max"), WidthMode::kMax);
  EXPECT_FALSE(ParseWidthMode("mean").ok());
}

TEST(TruncationTest, ReproducibleAndZeroWidthExact) {
  const TruncationBox box{{0, 3}, {1, 3}};
  const EmbeddingMatrix s = Rows({{0.2, 9}, {0.4, -9}});
  SeededRng a(5, "t"), b(5, "t");
  ASSERT_OK_AND_ASSIGN(auto za, TruncationMechanism(s, box, Eps(1), a));
  ASSERT_OK_AND_ASSIGN(auto zb, TruncationMechanism(s, box, Eps(1), b));
  EXPECT_EQ(za, zb);
  EXPECT_EQ(za[1], 3.0);
  EXPECT_NE(za[0], 0.3);
}

TEST(TruncationTest, DimensionMismatchIsAnError) {
  const TruncationBox box{{0}, {1}};
  SeededRng rng(1, "t");
  EXPECT_FALSE(TruncationMechanism(Rows({{1, 2}}), box, Eps(1), rng).ok());
}

TEST(VocabTest, NearestAndLookup) {
  ASSERT_OK_AND_ASSIGN(
      VocabEmbedding vocab,
      VocabEmbedding::Create({"near", "far"}, Rows({{0, 0}, {10, 0}})));
  EXPECT_EQ(vocab.Nearest(std::vector<double>{6, 0}), 1u);
  EXPECT_EQ(vocab.Nearest(std::vector<double>{5, 0}), 0u);  // tie
  EXPECT_EQ(*vocab.Lookup("far"), 1u);
  EXPECT_EQ(vocab.Lookup("gone").status().code(), absl::StatusCode::kNotFound);
}

TEST(VocabTest, RejectsMalformedVocabularies) {
  EXPECT_FALSE(VocabEmbedding::Create({"a", "a"}, Rows({{0}, {1}})).ok());
  EXPECT_FALSE(VocabEmbedding::Create({"a"}, Rows({{0}, {1}})).ok());
  EXPECT_FALSE(VocabEmbedding::Create({}, EmbeddingMatrix(0, 2)).ok());
}

TEST(MetricNoiseTest, NormHasGammaMean) {
  SeededRng rng(3, "mdp");
  const size_t dim = 4;
  const double eps = 2.0;
  double total = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    ASSERT_OK_AND_ASSIGN(auto z, SampleMetricNoise(rng, dim, Eps(eps)));
    ASSERT_EQ(z.size(), dim);
    total += std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
  }
  EXPECT_NEAR(total / n, dim / eps, 0.03);
}

TEST(WordMdpTest, LargeEpsilonKeepsTokens) {
  ASSERT_OK_AND_ASSIGN(
      VocabEmbedding vocab,
      VocabEmbedding::Create({"a", "b", "c"},
                             Rows({{0, 0}, {100, 0}, {0, 100}})));
  SeededRng rng(1, "mdp");
  const std::vector<std::string> text = {"c", "a", "b", "a"};
  ASSERT_OK_AND_ASSIGN(auto out, WordMdp(text, vocab, Eps(1e3), rng));
  EXPECT_EQ(out, text);
}

TEST(WordMdpTest, UnknownTokenIsAnError) {
  ASSERT_OK_AND_ASSIGN(VocabEmbedding vocab,
                       VocabEmbedding::Create({"a"}, Rows({{0}})));
  SeededRng rng(1, "mdp");
  const std::vector<std::string> text = {"zzz"};
  const auto out = WordMdp(text, vocab, Eps(1), rng);
  ASSERT_FALSE(out.ok());
  EXPECT_THAT(out.status().message(), HasSubstr("zzz"));
}

TEST(RandomGuessTest, SumOfSquares) {
  EXPECT_DOUBLE_EQ(*RandomGuessScore(std::vector<double>{0.7, 0.3}), 0.58);
  EXPECT_DOUBLE_EQ(*RandomGuessScore(std::vector<double>{0.25, 0.25, 0.25, 0.25}),
                   0.25);
  EXPECT_FALSE(RandomGuessScore(std::vector<double>{0.7, 0.7}).ok());
  EXPECT_FALSE(RandomGuessScore(std::vector<double>{}).ok());
}

TEST(RandomGuessTest, LabelFractions) {
  const std::vector<int> labels = {0, 2, 2, 2};
  EXPECT_THAT(*LabelFractions(labels, 3), ElementsAre(0.25, 0.0, 0.75));
  EXPECT_FALSE(LabelFractions(labels, 2).ok());
}

}  // namespace
}  // namespace deepcand
