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

#include "deepcand/store.h"

#include <bit>
#include <cstring>
#include <sstream>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace deepcand {
namespace {

using ::deepcand::testing::Rows;
using ::testing::HasSubstr;

std::string Serialize(const EmbeddingMatrix& m) {
  std::ostringstream out(std::ios::binary);
  EXPECT_OK(WriteEmbeddings(m, out));
  return out.str();
}

absl::StatusOr<EmbeddingMatrix> Parse(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return ReadEmbeddings(in);
}

TEST(EmbeddingsTest, EmptyMatrixIsHeaderOnly) {
  const std::string bytes = Serialize(EmbeddingMatrix(0, 4));
  ASSERT_EQ(bytes.size(), 16u);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  const unsigned char expected[16] = {'E', 'M', 'B', '1', 1, 0, 0, 0,
                                      0,   0,   0,   0,   4, 0, 0, 0};
  EXPECT_EQ(std::memcmp(bytes.data(), expected, 16), 0);
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix back, Parse(bytes));
  EXPECT_EQ(back.rows(), 0u);
  EXPECT_EQ(back.cols(), 4u);
}

TEST(EmbeddingsTest, SmallMatrixLayoutIsLittleEndianBinary32) {
  const std::string bytes = Serialize(Rows({{1.0, 2.0}}));
  ASSERT_EQ(bytes.size(), 16u + 8u);
  // 1.0f = 0x3F800000, 2.0f = 0x40000000.
  const unsigned char payload[8] = {0, 0, 0x80, 0x3F, 0, 0, 0, 0x40};
  EXPECT_EQ(std::memcmp(bytes.data() + 16, payload, 8), 0);
  ASSERT_OK_AND_ASSIGN(EmbeddingMatrix back, Parse(bytes));
  EXPECT_EQ(back, Rows({{1.0, 2.0}}));
}

TEST(EmbeddingsTest, CandidateSizedFileHasExpectedByteCount) {
  EmbeddingMatrix m(5000, 768);
  const std::string bytes = Serialize(m);
  // Independent count: fixed header plus one 4-byte float per entry.
  size_t expected = 4 + 4 + 4 + 4;
  for (size_t r = 0; r < 5000; ++r) expected += 768 * sizeof(float);
  EXPECT_EQ(bytes.size(), expected);
  EXPECT_EQ(bytes.size(), 15360016u);
}

TEST(EmbeddingsTest, RoundTripPropertyOnRandomFloatMatrices) {
  SeededRng rng(7, "store-roundtrip");
  for (int trial = 0; trial < 50; ++trial) {
    const size_t rows = rng.UniformIndex(20);
    const size_t cols = 1 + rng.UniformIndex(12);
    EmbeddingMatrix m(rows, cols);
    for (double& v : m.values()) {
      v = static_cast<float>(1e3 * rng.Gaussian());
    }
    const std::string bytes = Serialize(m);
    ASSERT_OK_AND_ASSIGN(EmbeddingMatrix back, Parse(bytes));
    EXPECT_EQ(back, m);
    EXPECT_EQ(Serialize(back), bytes);
  }
}

TEST(EmbeddingsTest, DistinctDiagnostics) {
  std::string bytes = Serialize(Rows({{1.0, 2.0}}));

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THAT(std::string(Parse(bad_magic).status().message()),
              HasSubstr("bad magic"));

  EXPECT_THAT(std::string(Parse(bytes.substr(0, 20)).status().message()),
              HasSubstr("truncated payload"));
  EXPECT_THAT(std::string(Parse(bytes.substr(0, 10)).status().message()),
              HasSubstr("truncated header"));

  std::string nan = bytes;
  const uint32_t nan_bits = std::bit_cast<uint32_t>(
      std::numeric_limits<float>::quiet_NaN());
  std::memcpy(nan.data() + 20, &nan_bits, 4);
  EXPECT_THAT(std::string(Parse(nan).status().message()),
              HasSubstr("non-finite value at row 0, column 1"));

  std::string version = bytes;
  version[4] = 2;
  EXPECT_THAT(std::string(Parse(version).status().message()),
              HasSubstr("unsupported version"));
}

TEST(EmbeddingsTest, WriteRejectsNonFinite) {
  EmbeddingMatrix m = Rows({{1.0, std::numeric_limits<double>::infinity()}});
  std::ostringstream out;
  EXPECT_FALSE(WriteEmbeddings(m, out).ok());
  EXPECT_TRUE(out.str().empty());
  EXPECT_FALSE(WriteEmbeddings(Rows({{1e300}}), out).ok());
}

absl::StatusOr<CorpusIndex> ParseIndex(const std::string& text) {
  std::istringstream in(text);
  return ReadIndex(in);
}

TEST(IndexTest, EmptyStreamGivesEmptyIndex) {
  ASSERT_OK_AND_ASSIGN(CorpusIndex index, ParseIndex(""));
  EXPECT_TRUE(index.empty());
}

TEST(IndexTest, ExactTilingAccepted) {
  ASSERT_OK_AND_ASSIGN(
      CorpusIndex index,
      ParseIndex(R"({"doc_id":"a","label":"x","start":0,"count":3}
{"doc_id":"b","label":"y","start":3,"count":2}
)"));
  ASSERT_EQ(index.size(), 2u);
  EXPECT_OK(index.CheckBounds(5));
  EXPECT_FALSE(index.CheckBounds(4).ok());
  EXPECT_EQ(index[1], (CorpusEntry{"b", "y", 3, 2}));
}

TEST(IndexTest, OverlapRejected) {
  auto index = ParseIndex(R"({"doc_id":"a","label":"x","start":0,"count":3}
{"doc_id":"b","label":"y","start":2,"count":3}
)");
  ASSERT_FALSE(index.ok());
  EXPECT_THAT(std::string(index.status().message()), HasSubstr("overlap"));
}

TEST(IndexTest, MalformedLineReportsLineNumber) {
  auto index = ParseIndex(R"({"doc_id":"a","label":"x","start":0,"count":3}

{"doc_id":"b","label":"y","start":3}
)");
  ASSERT_FALSE(index.ok());
  EXPECT_THAT(std::string(index.status().message()), HasSubstr("line 3"));

  EXPECT_THAT(std::string(ParseIndex("{not json\n").status().message()),
              HasSubstr("line 1"));
  EXPECT_FALSE(
      ParseIndex(R"({"doc_id":"a","label":"x","start":-1,"count":3})").ok());
  EXPECT_FALSE(
      ParseIndex(R"({"doc_id":"a","label":"x","start":0,"count":0})").ok());
  EXPECT_FALSE(ParseIndex(
                   R"({"doc_id":"a","label":"x","start":0,"count":1,"z":1})")
                   .ok());
  EXPECT_FALSE(ParseIndex(R"({"doc_id":"a","label":"x","start":0,"count":1}
{"doc_id":"a","label":"x","start":1,"count":1})")
                   .ok());
}

TEST(IndexTest, ClassIdsFollowSortedLabels) {
  ASSERT_OK_AND_ASSIGN(CorpusIndex index,
                       CorpusIndex::Create({{"d0", "pos", 0, 1},
                                            {"d1", "neg", 1, 1},
                                            {"d2", "pos", 2, 1}}));
  EXPECT_EQ(index.SortedLabels(), (std::vector<std::string>{"neg", "pos"}));
  EXPECT_EQ(index.ClassIds(), (std::vector<int>{1, 0, 1}));
}

TEST(IndexTest, WriteThenReadPreservesEntries) {
  ASSERT_OK_AND_ASSIGN(CorpusIndex index,
                       CorpusIndex::Create({{"d\"q", "lé", 0, 2},
                                            {"d1", "x", 2, 1}}));
  std::ostringstream out;
  ASSERT_OK(WriteIndex(index, out));
  ASSERT_OK_AND_ASSIGN(CorpusIndex back, ParseIndex(out.str()));
  EXPECT_EQ(back.entries(), index.entries());
}

TEST(CorpusTest, MakeCorpusChecksBounds) {
  ASSERT_OK_AND_ASSIGN(CorpusIndex index,
                       CorpusIndex::Create({{"a", "x", 0, 3}}));
  EXPECT_FALSE(MakeCorpus(EmbeddingMatrix(2, 2), index).ok());
  ASSERT_OK_AND_ASSIGN(Corpus corpus, MakeCorpus(EmbeddingMatrix(3, 2), index));
  EXPECT_EQ(corpus.Document(0).rows(), 3u);
}

TEST(SelectionRecordTest, JsonLinesRoundTrip) {
  const std::vector<SelectionRecord> records = {
      {"doc-1", 4, 2.0, 10.0, 18446744073709551615ull}, {"doc-2", 0, 0.0, 3.0, 7}};
  std::ostringstream out;
  ASSERT_OK(WriteSelectionRecords(records, out));
  EXPECT_THAT(out.str(), HasSubstr(R"("chosen_candidate":4)"));
  std::istringstream in(out.str());
  ASSERT_OK_AND_ASSIGN(std::vector<SelectionRecord> back,
                       ReadSelectionRecords(in));
  EXPECT_EQ(back, records);
}

}  // namespace
}  // namespace deepcand
