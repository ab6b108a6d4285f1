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

#ifndef DEEPCAND_STORE_H_
#define DEEPCAND_STORE_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "deepcand/matrix.h"

namespace deepcand {

// EMB1 layout: "EMB1", u32 version (=1), u32 n_rows, u32 dim, then
// n_rows * dim binary32 values, all little-endian, row-major.
inline constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};
inline constexpr uint32_t kEmbVersion = 1;
inline constexpr size_t kEmbHeaderBytes = 16;

// Serializes `matrix`. Values are narrowed to binary32; non-finite values
// or values outside the binary32 range are rejected before anything is
// written.
absl::Status WriteEmbeddings(const EmbeddingMatrix& matrix, std::ostream& out);
absl::Status WriteEmbeddingsFile(const EmbeddingMatrix& matrix,
                                 const std::string& path);

// Parses an EMB1 stream. Bad magic, unsupported version, truncated payload
// and non-finite values produce distinct error messages.
absl::StatusOr<EmbeddingMatrix> ReadEmbeddings(std::istream& in);
absl::StatusOr<EmbeddingMatrix> ReadEmbeddingsFile(const std::string& path);

struct CorpusEntry {
  std::string doc_id;
  std::string label;
  size_t start = 0;
  size_t count = 0;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

// Documents as contiguous row ranges of an EmbeddingMatrix.
class CorpusIndex {
 public:
  CorpusIndex() = default;

  // Validates ranges (count >= 1, pairwise disjoint, unique doc ids). When
  // `n_rows` is given every range must also lie inside [0, n_rows).
  static absl::StatusOr<CorpusIndex> Create(std::vector<CorpusEntry> entries);
  static absl::StatusOr<CorpusIndex> Create(std::vector<CorpusEntry> entries,
                                            size_t n_rows);

  const std::vector<CorpusEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const CorpusEntry& operator[](size_t i) const { return entries_[i]; }

  // Checks every range against a matrix of `n_rows` rows.
  absl::Status CheckBounds(size_t n_rows) const;

  // Sorted distinct labels; class id = position in this list.
  std::vector<std::string> SortedLabels() const;
  // Class id per entry, using SortedLabels().
  std::vector<int> ClassIds() const;

 private:
  explicit CorpusIndex(std::vector<CorpusEntry> entries)
      : entries_(std::move(entries)) {}
  std::vector<CorpusEntry> entries_;
};

// One JSON object per line: {"doc_id", "label", "start", "count"}. Blank
// lines are skipped. Errors name the offending 1-based line.
absl::StatusOr<CorpusIndex> ReadIndex(std::istream& in);
absl::StatusOr<CorpusIndex> ReadIndexFile(const std::string& path);
absl::Status WriteIndex(const CorpusIndex& index, std::ostream& out);
absl::Status WriteIndexFile(const CorpusIndex& index, const std::string& path);

// Sentence matrix plus the index that cuts it into documents.
struct Corpus {
  EmbeddingMatrix sentences;
  CorpusIndex index;

  size_t num_documents() const { return index.size(); }
  size_t dim() const { return sentences.cols(); }
  ConstMatrixView Document(size_t i) const {
    return sentences.view().Rows(index[i].start, index[i].count);
  }
};

absl::StatusOr<Corpus> MakeCorpus(EmbeddingMatrix sentences, CorpusIndex index);
absl::StatusOr<Corpus> ReadCorpusFiles(const std::string& embeddings_path,
                                       const std::string& index_path);

struct SelectionRecord {
  std::string doc_id;
  size_t chosen_candidate = 0;
  double utility = 0.0;
  double epsilon = 0.0;
  uint64_t seed = 0;

  friend bool operator==(const SelectionRecord&,
                         const SelectionRecord&) = default;
};

// JSON lines {"doc_id","chosen_candidate","utility","epsilon","seed"}.
absl::Status WriteSelectionRecords(const std::vector<SelectionRecord>& records,
                                   std::ostream& out);
absl::StatusOr<std::vector<SelectionRecord>> ReadSelectionRecords(
    std::istream& in);

}  // namespace deepcand

#endif  // DEEPCAND_STORE_H_
