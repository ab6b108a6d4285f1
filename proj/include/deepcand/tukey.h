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

#ifndef DEEPCAND_TUKEY_H_
#define DEEPCAND_TUKEY_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/sampling.h"

namespace deepcand {

// How per-projection one-dimensional depths are combined into one utility.
//   kMin: the lowest depth over projections (an upper bound on Tukey depth).
//   kMax: the highest, i.e. max_j of -|h_j - k/2| shifted by k/2.
// Either rule moves by at most 1 when one sentence is replaced.
enum class DepthAggregation { kMin, kMax };

absl::StatusOr<DepthAggregation> ParseDepthAggregation(std::string_view name);
std::string_view DepthAggregationName(DepthAggregation rule);

struct DepthReport {
  size_t candidate = 0;
  // h_j: sentences whose projection is >= the candidate's (ties count).
  std::vector<int> per_projection_h;
  // min(h_j, k - h_j).
  std::vector<int> per_projection_depth;
  int depth = 0;
};

// Entry (i, j) = <points_i, v_j>; result is n x p.
absl::StatusOr<EmbeddingMatrix> ProjectAll(ConstMatrixView points,
                                           const ProjectionSet& projections);

// Approximate depth of every candidate among the sentence rows. O(m k p).
absl::StatusOr<std::vector<DepthReport>> ApproxDepth(
    ConstMatrixView candidates, ConstMatrixView sentences,
    const ProjectionSet& projections,
    DepthAggregation rule = DepthAggregation::kMin);

// Same depths as ApproxDepth without the per-projection detail.
absl::StatusOr<std::vector<int>> ApproxDepthUtilities(
    ConstMatrixView candidates, ConstMatrixView sentences,
    const ProjectionSet& projections,
    DepthAggregation rule = DepthAggregation::kMin);

// Exact halfplane depth in the plane: the minimum over unit w of
// #{y : w . (y - query) >= 0}. Enumerates the directions normal to each
// y - query, tilted infinitesimally to either side, using exact sign tests
// (cross and dot products) rather than angles. O(n^2).
absl::StatusOr<int> ExactDepth2d(std::span<const double> query,
                                 ConstMatrixView points);

// Index of the maximal depth, lowest index on ties.
absl::StatusOr<size_t> DeepestCandidate(std::span<const DepthReport> reports);
absl::StatusOr<size_t> DeepestCandidate(std::span<const int> depths);

}  // namespace deepcand

#endif  // DEEPCAND_TUKEY_H_
