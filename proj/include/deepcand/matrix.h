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

#ifndef DEEPCAND_MATRIX_H_
#define DEEPCAND_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace deepcand {

// Non-owning row-major view over a dense matrix of doubles.
class ConstMatrixView {
 public:
  ConstMatrixView() = default;
  ConstMatrixView(const double* data, size_t rows, size_t cols)
      : data_(data), rows_(rows), cols_(cols) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }
  const double* data() const { return data_; }

  std::span<const double> row(size_t i) const {
    return {data_ + i * cols_, cols_};
  }
  double operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  // Rows [start, start + count).
  ConstMatrixView Rows(size_t start, size_t count) const {
    return ConstMatrixView(data_ + start * cols_, count, cols_);
  }

 private:
  const double* data_ = nullptr;
  size_t rows_ = 0;
  size_t cols_ = 0;
};

// Dense n x d matrix of embedding coordinates. Held in binary64; the on-disk
// form (see store.h) is binary32.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  // Fails unless values.size() == rows * cols.
  static absl::StatusOr<EmbeddingMatrix> FromValues(size_t rows, size_t cols,
                                                    std::vector<double> values);
  // Copies `view` into an owning matrix.
  static EmbeddingMatrix Copy(ConstMatrixView view);
  // Stacks rows of equal length; fails on ragged input.
  static absl::StatusOr<EmbeddingMatrix> FromRows(
      const std::vector<std::vector<double>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<double> row(size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  double operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  ConstMatrixView view() const {
    return ConstMatrixView(data_.data(), rows_, cols_);
  }
  operator ConstMatrixView() const { return view(); }  // NOLINT

  void AppendRow(std::span<const double> values);

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace deepcand

#endif  // DEEPCAND_MATRIX_H_
