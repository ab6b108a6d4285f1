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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "deepcand/status_macros.h"
#include "json.hpp"

namespace deepcand {
namespace {

using nlohmann::json;

void PutU32(uint32_t v, unsigned char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

uint32_t GetU32(const unsigned char* in) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in[i]) << (8 * i);
  return v;
}

absl::Status CheckStream(const std::ostream& out) {
  if (!out) return absl::DataLossError("embedding sink write failed");
  return absl::OkStatus();
}

}  // namespace

absl::Status WriteEmbeddings(const EmbeddingMatrix& matrix, std::ostream& out) {
  if (matrix.rows() > std::numeric_limits<uint32_t>::max() ||
      matrix.cols() > std::numeric_limits<uint32_t>::max()) {
    return absl::InvalidArgumentError("matrix too large for EMB1");
  }
  constexpr double kMaxFloat = std::numeric_limits<float>::max();
  for (double v : matrix.values()) {
    if (!std::isfinite(v) || std::fabs(v) > kMaxFloat) {
      return absl::InvalidArgumentError(
          "matrix holds a value not representable as a finite binary32");
    }
  }
  std::array<unsigned char, kEmbHeaderBytes> header{};
  std::memcpy(header.data(), kEmbMagic, 4);
  PutU32(kEmbVersion, header.data() + 4);
  PutU32(static_cast<uint32_t>(matrix.rows()), header.data() + 8);
  PutU32(static_cast<uint32_t>(matrix.cols()), header.data() + 12);
  out.write(reinterpret_cast<const char*>(header.data()), header.size());

  std::vector<unsigned char> payload(matrix.values().size() * 4);
  for (size_t i = 0; i < matrix.values().size(); ++i) {
    PutU32(std::bit_cast<uint32_t>(static_cast<float>(matrix.values()[i])),
           payload.data() + 4 * i);
  }
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  return CheckStream(out);
}

absl::Status WriteEmbeddingsFile(const EmbeddingMatrix& matrix,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return WriteEmbeddings(matrix, out);
}

absl::StatusOr<EmbeddingMatrix> ReadEmbeddings(std::istream& in) {
  std::array<unsigned char, kEmbHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    return absl::DataLossError("EMB1: truncated header");
  }
  if (std::memcmp(header.data(), kEmbMagic, 4) != 0) {
    return absl::InvalidArgumentError("EMB1: bad magic");
  }
  const uint32_t version = GetU32(header.data() + 4);
  if (version != kEmbVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("EMB1: unsupported version ", version));
  }
  const size_t rows = GetU32(header.data() + 8);
  const size_t cols = GetU32(header.data() + 12);
  const size_t count = rows * cols;

  std::vector<unsigned char> payload(count * 4);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (static_cast<size_t>(in.gcount()) != payload.size()) {
    return absl::DataLossError(
        absl::StrCat("EMB1: truncated payload, expected ", payload.size(),
                     " bytes, got ", in.gcount()));
  }
  std::vector<double> values(count);
  for (size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(GetU32(payload.data() + 4 * i));
    if (!std::isfinite(f)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "EMB1: non-finite value at row ", i / cols, ", column ", i % cols));
    }
    values[i] = f;
  }
  return EmbeddingMatrix::FromValues(rows, cols, std::move(values));
}

absl::StatusOr<EmbeddingMatrix> ReadEmbeddingsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto result = ReadEmbeddings(in);
  if (!result.ok()) {
    return absl::Status(result.status().code(),
                        absl::StrCat(path, ": ", result.status().message()));
  }
  return result;
}

absl::StatusOr<CorpusIndex> CorpusIndex::Create(
    std::vector<CorpusEntry> entries) {
  std::set<std::string> ids;
  for (const CorpusEntry& e : entries) {
    if (e.count < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("document ", e.doc_id, " has zero sentences"));
    }
    if (!ids.insert(e.doc_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate doc_id ", e.doc_id));
    }
  }
  std::vector<size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return entries[a].start < entries[b].start;
  });
  for (size_t i = 1; i < order.size(); ++i) {
    const CorpusEntry& prev = entries[order[i - 1]];
    const CorpusEntry& cur = entries[order[i]];
    if (prev.start + prev.count > cur.start) {
      return absl::InvalidArgumentError(
          absl::StrCat("documents ", prev.doc_id, " [", prev.start, ",",
                       prev.start + prev.count, ") and ", cur.doc_id, " [",
                       cur.start, ",", cur.start + cur.count, ") overlap"));
    }
  }
  return CorpusIndex(std::move(entries));
}

absl::StatusOr<CorpusIndex> CorpusIndex::Create(
    std::vector<CorpusEntry> entries, size_t n_rows) {
  DEEPCAND_ASSIGN_OR_RETURN(CorpusIndex index, Create(std::move(entries)));
  DEEPCAND_RETURN_IF_ERROR(index.CheckBounds(n_rows));
  return index;
}

absl::Status CorpusIndex::CheckBounds(size_t n_rows) const {
  for (const CorpusEntry& e : entries_) {
    if (e.start > n_rows || e.count > n_rows - e.start) {
      return absl::OutOfRangeError(
          absl::StrCat("document ", e.doc_id, " range [", e.start, ",",
                       e.start + e.count, ") exceeds ", n_rows, " rows"));
    }
  }
  return absl::OkStatus();
}

std::vector<std::string> CorpusIndex::SortedLabels() const {
  std::set<std::string> labels;
  for (const CorpusEntry& e : entries_) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

std::vector<int> CorpusIndex::ClassIds() const {
  const std::vector<std::string> labels = SortedLabels();
  std::vector<int> ids;
  ids.reserve(entries_.size());
  for (const CorpusEntry& e : entries_) {
    ids.push_back(static_cast<int>(
        std::lower_bound(labels.begin(), labels.end(), e.label) -
        labels.begin()));
  }
  return ids;
}

absl::StatusOr<CorpusIndex> ReadIndex(std::istream& in) {
  std::vector<CorpusEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      return absl::InvalidArgumentError(
          absl::StrCat("index line ", line_no, ": ", why));
    };
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return fail("malformed JSON");
    if (j.size() != 4) return fail("expected exactly doc_id, label, start, count");
    for (const char* key : {"doc_id", "label", "start", "count"}) {
      if (!j.contains(key)) return fail(absl::StrCat("missing field ", key));
    }
    if (!j["doc_id"].is_string() || !j["label"].is_string()) {
      return fail("doc_id and label must be strings");
    }
    if (!j["start"].is_number_unsigned() || !j["count"].is_number_unsigned()) {
      return fail("start and count must be non-negative integers");
    }
    entries.push_back({j["doc_id"].get<std::string>(),
                       j["label"].get<std::string>(),
                       j["start"].get<size_t>(), j["count"].get<size_t>()});
  }
  if (in.bad()) return absl::DataLossError("index read failed");
  return CorpusIndex::Create(std::move(entries));
}

absl::StatusOr<CorpusIndex> ReadIndexFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadIndex(in);
}

absl::Status WriteIndex(const CorpusIndex& index, std::ostream& out) {
  for (const CorpusEntry& e : index.entries()) {
    json j = {{"doc_id", e.doc_id},
              {"label", e.label},
              {"start", e.start},
              {"count", e.count}};
    out << j.dump() << '\n';
  }
  if (!out) return absl::DataLossError("index write failed");
  return absl::OkStatus();
}

absl::Status WriteIndexFile(const CorpusIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return WriteIndex(index, out);
}

absl::StatusOr<Corpus> MakeCorpus(EmbeddingMatrix sentences,
                                  CorpusIndex index) {
  DEEPCAND_RETURN_IF_ERROR(index.CheckBounds(sentences.rows()));
  return Corpus{std::move(sentences), std::move(index)};
}

absl::StatusOr<Corpus> ReadCorpusFiles(const std::string& embeddings_path,
                                       const std::string& index_path) {
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix sentences,
                            ReadEmbeddingsFile(embeddings_path));
  DEEPCAND_ASSIGN_OR_RETURN(CorpusIndex index, ReadIndexFile(index_path));
  return MakeCorpus(std::move(sentences), std::move(index));
}

absl::Status WriteSelectionRecords(const std::vector<SelectionRecord>& records,
                                   std::ostream& out) {
  for (const SelectionRecord& r : records) {
    json j = {{"doc_id", r.doc_id},
              {"chosen_candidate", r.chosen_candidate},
              {"utility", r.utility},
              {"epsilon", r.epsilon},
              {"seed", r.seed}};
    out << j.dump() << '\n';
  }
  if (!out) return absl::DataLossError("selection write failed");
  return absl::OkStatus();
}

absl::StatusOr<std::vector<SelectionRecord>> ReadSelectionRecords(
    std::istream& in) {
  std::vector<SelectionRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") ||
        !j.contains("chosen_candidate") || !j.contains("utility") ||
        !j.contains("epsilon") || !j.contains("seed") ||
        !j["doc_id"].is_string() || !j["chosen_candidate"].is_number_unsigned() ||
        !j["utility"].is_number() || !j["epsilon"].is_number() ||
        !j["seed"].is_number_unsigned()) {
      return absl::InvalidArgumentError(
          absl::StrCat("selection line ", line_no, ": malformed record"));
    }
    records.push_back({j["doc_id"].get<std::string>(),
                       j["chosen_candidate"].get<size_t>(),
                       j["utility"].get<double>(), j["epsilon"].get<double>(),
                       j["seed"].get<uint64_t>()});
  }
  return records;
}

}  // namespace deepcand
