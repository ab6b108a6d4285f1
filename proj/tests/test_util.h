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

#ifndef DEEPCAND_TESTS_TEST_UTIL_H_
#define DEEPCAND_TESTS_TEST_UTIL_H_

#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/rng.h"
#include "gtest/gtest.h"

#define DEEPCAND_TEST_CONCAT_INNER_(x, y) x##y
#define DEEPCAND_TEST_CONCAT_(x, y) DEEPCAND_TEST_CONCAT_INNER_(x, y)

#define ASSERT_OK(expr) ASSERT_TRUE((expr).ok()) << (expr)
#define EXPECT_OK(expr) EXPECT_TRUE((expr).ok()) << (expr)

#define ASSERT_OK_AND_ASSIGN_IMPL_(statusor, lhs, rexpr)   \
  auto statusor = (rexpr);                                \
  ASSERT_TRUE(statusor.ok()) << statusor.status();        \
  lhs = *std::move(statusor)

#define ASSERT_OK_AND_ASSIGN(lhs, rexpr)                                  \
  ASSERT_OK_AND_ASSIGN_IMPL_(                                             \
      DEEPCAND_TEST_CONCAT_(_statusor_, __LINE__), lhs, rexpr)

namespace deepcand::testing {

inline EmbeddingMatrix Rows(const std::vector<std::vector<double>>& rows) {
  return *EmbeddingMatrix::FromRows(rows);
}

inline EmbeddingMatrix GaussianMatrix(SeededRng& rng, size_t rows, size_t cols,
                                      double scale = 1.0) {
  EmbeddingMatrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.Gaussian();
  return m;
}

inline std::vector<double> Values(const EmbeddingMatrix& m) {
  return {m.values().begin(), m.values().end()};
}

}  // namespace deepcand::testing

#endif  // DEEPCAND_TESTS_TEST_UTIL_H_
