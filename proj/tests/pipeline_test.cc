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

#include "deepcand/pipeline.h"

#include <set>

#include "deepcand/parallel.h"
#include "deepcand/synthetic.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace deepcand {
namespace {

using ::deepcand::testing::Values;

using ::deepcand::testing::GaussianMatrix;
using ::deepcand::testing::Rows;
using ::testing::ElementsAre;

Corpus SmallCorpus(size_t docs, uint64_t seed, size_t dim = 6) {
  SyntheticOptions o;
  o.num_docs = docs;
  o.dim = dim;
  o.seed = seed;
  return *GenerateTopicCorpus(o);
}

TEST(MeanEmbeddingTest, AveragesRows) {
  EXPECT_THAT(*MeanEmbedding(Rows({{1, 2}, {3, 6}})), ElementsAre(2.0, 4.0));
  EXPECT_FALSE(MeanEmbedding(EmbeddingMatrix(0, 2)).ok());
}

TEST(DocumentSeedTest, PerDocumentAndRun) {
  EXPECT_EQ(DocumentSeed(1, "a"), DocumentSeed(1, "a"));
  EXPECT_NE(DocumentSeed(1, "a"), DocumentSeed(1, "b"));
  EXPECT_NE(DocumentSeed(1, "a"), DocumentSeed(2, "a"));
}

TEST(DocumentMeansTest, MatchesPerDocumentMeans) {
  const Corpus c = SmallCorpus(10, 1);
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix means, DocumentMeans(c));
  ASSERT_EQ(means.rows(), 10u);
  for (size_t i = 0; i < 10; ++i) {
    ASSERT_OK_AND_ASSIGN(auto m, MeanEmbedding(c.Document(i)));
    for (size_t j = 0; j < c.dim(); ++j) EXPECT_EQ(means(i, j), m[j]);
  }
}

TEST(RecoderTest, IdentityStartWithoutTrainingIsTheIdentity) {
  const Corpus c = SmallCorpus(30, 2);
  RecoderOptions o;
  o.n_clusters = 3;
  o.epochs = 0;
  o.identity_init = true;
  ASSERT_OK_AND_ASSIGN(RecoderBundle b, TrainRecoder(c, o, 1));
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix plain, DocumentMeans(c));
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix recoded, DocumentMeans(c, &b));
  EXPECT_EQ(Values(plain), Values(recoded));
}

TEST(RecoderTest, TrainingReducesLossAndIsReproducible) {
  const Corpus c = SmallCorpus(200, 3);
  RecoderOptions o;
  o.n_clusters = 4;
  o.epochs = 40;
  o.hidden = 16;
  ASSERT_OK_AND_ASSIGN(RecoderBundle a, TrainRecoder(c, o, 7));
  ASSERT_OK_AND_ASSIGN(RecoderBundle b, TrainRecoder(c, o, 7));
  ASSERT_EQ(a.loss_history.size(), 40u);
  EXPECT_LT(a.loss_history.back(), a.loss_history.front());
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(std::vector<double>(a.recoder.parameters().begin(),
                                a.recoder.parameters().end()),
            std::vector<double>(b.recoder.parameters().begin(),
                                b.recoder.parameters().end()));
  ASSERT_OK_AND_ASSIGN(double agreement, ClusterAgreement(a, c));
  EXPECT_GT(agreement, 0.6);
  EXPECT_EQ(a.dim(), c.dim());
}

TEST(RecoderTest, ThreadCountDoesNotChangeTraining) {
  const Corpus c = SmallCorpus(80, 4);
  RecoderOptions o;
  o.n_clusters = 4;
  o.epochs = 2;
  SetThreadCount(1);
  ASSERT_OK_AND_ASSIGN(RecoderBundle a, TrainRecoder(c, o, 1));
  SetThreadCount(4);
  ASSERT_OK_AND_ASSIGN(RecoderBundle b, TrainRecoder(c, o, 1));
  SetThreadCount(0);
  EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(CandidatesTest, DistinctQualifyingSources) {
  const Corpus c = SmallCorpus(100, 5);
  SeededRng rng(1, "candidates");
  ASSERT_OK_AND_ASSIGN(CandidateSet set, BuildCandidates(c, 8, 30, rng));
  ASSERT_EQ(set.size(), 30u);
  std::set<std::string> ids(set.source_doc_ids.begin(),
                            set.source_doc_ids.end());
  EXPECT_EQ(ids.size(), 30u);
  for (size_t i = 0; i < set.size(); ++i) {
    size_t doc = 0;
    while (c.index[doc].doc_id != set.source_doc_ids[i]) ++doc;
    EXPECT_GE(c.index[doc].count, 8u);
    ASSERT_OK_AND_ASSIGN(auto mean, MeanEmbedding(c.Document(doc)));
    for (size_t j = 0; j < c.dim(); ++j) {
      EXPECT_EQ(set.embeddings(i, j), mean[j]);
    }
  }
}

TEST(CandidatesTest, TooFewQualifyingDocuments) {
  const Corpus c = SmallCorpus(20, 6);
  SeededRng rng(1, "candidates");
  const auto set = BuildCandidates(c, 8, 500, rng);
  EXPECT_EQ(set.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(BuildCandidates(c, 8, 0, rng).ok());
}

class PrivatizeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = SmallCorpus(40, 8);
    const Corpus pub = SmallCorpus(100, 9);
    SeededRng rng(1, "candidates");
    candidates_ = *BuildCandidates(pub, 4, 50, rng);
    options_.epsilon = 5;
    options_.projections = 10;
    options_.seed = 42;
  }
  Corpus corpus_;
  CandidateSet candidates_;
  PrivatizeOptions options_;
};

TEST_F(PrivatizeTest, MatchesSingleDocumentSelection) {
  ASSERT_OK_AND_ASSIGN(auto records,
                       PrivatizeCorpus(corpus_, candidates_, nullptr, options_));
  ASSERT_EQ(records.size(), corpus_.num_documents());
  for (size_t i = 0; i < records.size(); ++i) {
    const std::string& id = corpus_.index[i].doc_id;
    EXPECT_EQ(records[i].doc_id, id);
    ASSERT_OK_AND_ASSIGN(
        PrivateSelection one,
        SelectPrivateEmbedding(corpus_.Document(i), candidates_.embeddings,
                               *PrivacyBudget::Create(5), 10,
                               DocumentSeed(42, id)));
    EXPECT_EQ(records[i].chosen_candidate, one.record.chosen_candidate);
    EXPECT_EQ(records[i].utility, one.record.utility);
    EXPECT_EQ(records[i].seed, DocumentSeed(42, id));
    EXPECT_EQ(records[i].epsilon, 5.0);
  }
}

TEST_F(PrivatizeTest, ReproducibleAcrossThreadCounts) {
  SetThreadCount(1);
  ASSERT_OK_AND_ASSIGN(auto a,
                       PrivatizeCorpus(corpus_, candidates_, nullptr, options_));
  SetThreadCount(6);
  ASSERT_OK_AND_ASSIGN(auto b,
                       PrivatizeCorpus(corpus_, candidates_, nullptr, options_));
  SetThreadCount(0);
  EXPECT_EQ(a, b);
  options_.seed = 43;
  ASSERT_OK_AND_ASSIGN(auto c,
                       PrivatizeCorpus(corpus_, candidates_, nullptr, options_));
  EXPECT_NE(a, c);
}

TEST_F(PrivatizeTest, ValidatesInputs) {
  options_.epsilon = 0;
  EXPECT_FALSE(PrivatizeCorpus(corpus_, candidates_, nullptr, options_).ok());
  options_.epsilon = 1;
  options_.projections = 0;
  EXPECT_FALSE(PrivatizeCorpus(corpus_, candidates_, nullptr, options_).ok());
  options_.projections = 5;
  CandidateSet wrong;
  wrong.embeddings = EmbeddingMatrix(3, 2);
  wrong.source_doc_ids = {"a", "b", "c"};
  EXPECT_FALSE(PrivatizeCorpus(corpus_, wrong, nullptr, options_).ok());
}

TEST(ClassifierTest, SeparatesClustersAndCallsHook) {
  SeededRng rng(1, "data");
  EmbeddingMatrix x = GaussianMatrix(rng, 100, 3, 0.3);
  std::vector<int> y(100);
  for (size_t i = 0; i < 100; ++i) {
    y[i] = static_cast<int>(i % 2);
    x(i, 0) += y[i] ? 3.0 : -3.0;
  }
  ClassifierOptions o;
  o.epochs = 15;
  o.hidden = 8;
  o.adam.learning_rate = 1e-2;
  std::vector<size_t> seen;
  o.on_epoch = [&](size_t epoch, const Mlp&) {
    seen.push_back(epoch);
    return absl::OkStatus();
  };
  SeededRng train(2, "classifier");
  std::vector<double> losses;
  ASSERT_OK_AND_ASSIGN(Mlp model, TrainClassifier(x, y, 2, o, train, &losses));
  EXPECT_EQ(seen.size(), 15u);
  EXPECT_EQ(seen.front(), 1u);
  EXPECT_LT(losses.back(), losses.front());
  ASSERT_OK_AND_ASSIGN(std::vector<int> pred, PredictClasses(model, x));
  EXPECT_EQ(pred, y);
}

TEST(ClassifierTest, RejectsBadLabels) {
  const EmbeddingMatrix x = Rows({{0}, {1}});
  SeededRng rng(1, "c");
  EXPECT_FALSE(TrainClassifier(x, std::vector<int>{0, 2}, 2, {}, rng).ok());
  EXPECT_FALSE(TrainClassifier(x, std::vector<int>{0}, 2, {}, rng).ok());
}

TEST(GatherRowsTest, CopiesInOrder) {
  const EmbeddingMatrix m = Rows({{1}, {2}, {3}});
  const std::vector<size_t> rows = {2, 0, 2};
  EXPECT_THAT(Values(GatherRows(m, rows)), ElementsAre(3, 1, 3));
}

}  // namespace
}  // namespace deepcand
