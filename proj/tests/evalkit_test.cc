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

#include "deepcand/evalkit.h"

#include <sstream>

#include "deepcand/synthetic.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace deepcand {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(MacroF1Test, PerfectIsOne) {
  const std::vector<int> y = {0, 1, 2, 1};
  EXPECT_DOUBLE_EQ(*MacroF1(y, y, 3), 1.0);
}

TEST(MacroF1Test, AllZeroOnBalancedBinaryIsOneThird) {
  const std::vector<int> truth = {0, 0, 1, 1};
  const std::vector<int> pred = {0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(*MacroF1(pred, truth, 2), 1.0 / 3.0);
}

TEST(MacroF1Test, ClassesAbsentEverywhereAreExcluded) {
  const std::vector<int> truth = {1, 1};
  const std::vector<int> pred = {1, 1};
  EXPECT_DOUBLE_EQ(*MacroF1(pred, truth, 5), 1.0);
  // A class present only in predictions counts with F1 = 0.
  const std::vector<int> pred2 = {1, 3};
  EXPECT_DOUBLE_EQ(*MacroF1(pred2, truth, 5), (2.0 / 3.0) / 2.0);
}

TEST(MacroF1Test, PermutationInvariant) {
  SeededRng rng(1, "f1");
  std::vector<int> truth(50), pred(50);
  for (size_t i = 0; i < 50; ++i) {
    truth[i] = static_cast<int>(rng.UniformIndex(4));
    pred[i] = static_cast<int>(rng.UniformIndex(4));
  }
  const double base = *MacroF1(pred, truth, 4);
  std::vector<size_t> order(50);
  for (size_t i = 0; i < 50; ++i) order[i] = (i * 17) % 50;
  std::vector<int> t2, p2;
  for (size_t i : order) {
    t2.push_back(truth[i]);
    p2.push_back(pred[i]);
  }
  EXPECT_DOUBLE_EQ(*MacroF1(p2, t2, 4), base);
}

TEST(MacroF1Test, RejectsBadInput) {
  const std::vector<int> a = {0, 1};
  const std::vector<int> b = {0};
  const std::vector<int> c = {0, 7};
  EXPECT_FALSE(MacroF1(a, b, 2).ok());
  EXPECT_FALSE(MacroF1(c, a, 2).ok());
  EXPECT_FALSE(MacroF1(b, b, 0).ok());
}

TEST(KBucketTest, ParseAndName) {
  ASSERT_OK_AND_ASSIGN(KBucket b, ParseKBucket("4:8"));
  EXPECT_EQ(b.lo, 4u);
  EXPECT_EQ(b.hi, 8u);
  EXPECT_EQ(b.Name(), "[4,8)");
  EXPECT_FALSE(ParseKBucket("8:4").ok());
  EXPECT_FALSE(ParseKBucket("4").ok());
  EXPECT_FALSE(ParseKBucket("a:b").ok());
}

TEST(StatsTest, MeanAndPopulationStddev) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(Mean(v), 2.5);
  EXPECT_DOUBLE_EQ(PopulationStddev(v), std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(PopulationStddev(std::vector<double>{0.7}), 0.0);
}

TEST(TrialSeedTest, DependsOnEveryPart) {
  const uint64_t s = TrialSeed(1, "10", 0);
  EXPECT_EQ(s, TrialSeed(1, "10", 0));
  EXPECT_NE(s, TrialSeed(2, "10", 0));
  EXPECT_NE(s, TrialSeed(1, "3", 0));
  EXPECT_NE(s, TrialSeed(1, "10", 1));
}

TEST(SelectByValidationTest, FirstMaximum) {
  const std::vector<size_t> grid = {10, 25, 50, 100};
  ASSERT_OK_AND_ASSIGN(
      size_t best,
      SelectByValidation(grid, [](size_t p) -> absl::StatusOr<double> {
        return p == 25 || p == 100 ? 0.9 : 0.5;
      }));
  EXPECT_EQ(best, 25u);
  EXPECT_FALSE(SelectByValidation({}, [](size_t) -> absl::StatusOr<double> {
                 return 0.0;
               }).ok());
}

class SweepTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticOptions o;
    o.num_docs = 120;
    o.dim = 6;
    o.seed = 5;
    corpus_ = *GenerateTopicCorpus(o);
    labels_ = corpus_.index.ClassIds();
    ClassifierOptions c;
    c.epochs = 30;
    const EmbeddingMatrix means = *DocumentMeans(corpus_);
    SeededRng rng(1, "classifier");
    classifier_ = *TrainClassifier(means, labels_, 4, c, rng);
    ASSERT_OK_AND_ASSIGN(box_, FitBox(means));
  }

  Corpus corpus_;
  std::vector<int> labels_;
  Mlp classifier_;
  TruncationBox box_;
};

TEST_F(SweepTest, EpsilonSweepShapeAndReproducibility) {
  const EvalArm arm{TruncationEncoder(&box_, WidthMode::kPerDimension),
                    &classifier_};
  const EvalArm reference{MeanEncoder(nullptr), &classifier_};
  const std::vector<double> eps = {1, 30};
  ASSERT_OK_AND_ASSIGN(SweepResult a, SweepEpsilon(corpus_, labels_, 4, arm,
                                                   eps, 3, 7, &reference));
  ASSERT_OK_AND_ASSIGN(SweepResult b, SweepEpsilon(corpus_, labels_, 4, arm,
                                                   eps, 3, 7, &reference));
  ASSERT_EQ(a.points.size(), 3u);
  EXPECT_EQ(a.points[0].axis, "non-private");
  EXPECT_EQ(a.points[0].scores.size(), 1u);
  EXPECT_EQ(a.points[0].stddev, 0.0);
  for (size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].scores, b.points[i].scores);
    for (double s : a.points[i].scores) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
  EXPECT_EQ(a.points[1].scores.size(), 3u);
  EXPECT_GT(a.points[2].mean, a.points[1].mean);
}

TEST_F(SweepTest, SingleCellSweep) {
  const EvalArm arm{TruncationEncoder(&box_, WidthMode::kPerDimension),
                    &classifier_};
  const std::vector<double> eps = {5};
  ASSERT_OK_AND_ASSIGN(SweepResult r,
                       SweepEpsilon(corpus_, labels_, 4, arm, eps, 1, 7));
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.points[0].scores.size(), 1u);
  EXPECT_EQ(r.points[0].stddev, 0.0);
}

TEST_F(SweepTest, KSweepMarksEmptyBucketsAndPartitions) {
  const EvalArm arm{MeanEncoder(nullptr), &classifier_};
  const std::vector<KBucket> buckets = {{4, 10}, {10, 21}, {50, 60}};
  ASSERT_OK_AND_ASSIGN(SweepResult r,
                       SweepK(corpus_, labels_, 4, arm, buckets, 10, 2, 3));
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_FALSE(r.points[0].empty);
  EXPECT_FALSE(r.points[1].empty);
  EXPECT_TRUE(r.points[2].empty);
  EXPECT_TRUE(r.points[2].scores.empty());
  EXPECT_EQ(r.points[0].num_documents + r.points[1].num_documents,
            corpus_.num_documents());

  std::ostringstream csv;
  ASSERT_OK(WriteSweepCsv(r, csv));
  EXPECT_THAT(csv.str(), ::testing::StartsWith("axis,trial,score,mean,std\n"));
  EXPECT_THAT(csv.str(), HasSubstr("\"[50,60)\",,,empty,\n"));
}

TEST_F(SweepTest, SubsetCorpusCopiesDocuments) {
  const std::vector<size_t> keep = {3, 0};
  ASSERT_OK_AND_ASSIGN(Corpus sub, SubsetCorpus(corpus_, keep));
  ASSERT_EQ(sub.num_documents(), 2u);
  EXPECT_EQ(sub.index[0].doc_id, corpus_.index[3].doc_id);
  EXPECT_EQ(sub.index[1].label, corpus_.index[0].label);
  const ConstMatrixView a = sub.Document(0), b = corpus_.Document(3);
  ASSERT_EQ(a.rows(), b.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    EXPECT_TRUE(std::equal(a.row(i).begin(), a.row(i).end(), b.row(i).begin()));
  }
}

TEST_F(SweepTest, EpochSelectionKeepsTheBestEpoch) {
  const EmbeddingMatrix means = *DocumentMeans(corpus_);
  ClassifierOptions c;
  c.epochs = 8;
  SeededRng rng(2, "classifier");
  ASSERT_OK_AND_ASSIGN(
      EpochSelection sel,
      TrainClassifierWithValidation(means, labels_, 4, means, labels_, c, rng));
  ASSERT_EQ(sel.validation.size(), 8u);
  ASSERT_GE(sel.best_epoch, 1u);
  const double best = sel.validation[sel.best_epoch - 1];
  for (size_t e = 0; e < sel.validation.size(); ++e) {
    if (e + 1 < sel.best_epoch) EXPECT_LT(sel.validation[e], best);
    EXPECT_LE(sel.validation[e], best);
  }
  ASSERT_OK_AND_ASSIGN(std::vector<int> pred, PredictClasses(sel.model, means));
  EXPECT_DOUBLE_EQ(*MacroF1(pred, labels_, 4), best);
}

}  // namespace
}  // namespace deepcand
