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

#include "deepcand/matrix.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"

namespace deepcand {

absl::StatusOr<EmbeddingMatrix> EmbeddingMatrix::FromValues(
    size_t rows, size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) {
    return absl::InvalidArgumentError(
        absl::StrCat("matrix expects ", rows, "x", cols, " = ", rows * cols,
                     " values, got ", values.size()));
  }
  EmbeddingMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(values);
  return m;
}

EmbeddingMatrix EmbeddingMatrix::Copy(ConstMatrixView view) {
  EmbeddingMatrix m(view.rows(), view.cols());
  if (!view.empty()) {
    std::copy(view.data(), view.data() + view.rows() * view.cols(),
              m.data_.begin());
  }
  return m;
}

absl::StatusOr<EmbeddingMatrix> EmbeddingMatrix::FromRows(
    const std::vector<std::vector<double>>& rows) {
  EmbeddingMatrix m;
  for (const auto& r : rows) {
    if (!m.empty() && r.size() != m.cols()) {
      return absl::InvalidArgumentError("ragged rows");
    }
    m.AppendRow(r);
  }
  return m;
}

void EmbeddingMatrix::AppendRow(std::span<const double> values) {
  if (rows_ == 0) cols_ = values.size();
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

}  // namespace deepcand
