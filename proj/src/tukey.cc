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

#include "deepcand/tukey.h"

#include <algorithm>
#include <array>
#include <limits>

#include "absl/strings/str_cat.h"
#include "deepcand/parallel.h"
#include "deepcand/simd/kernels.h"

namespace deepcand {
namespace {

absl::Status CheckInputs(ConstMatrixView candidates, ConstMatrixView sentences,
                         const ProjectionSet& projections) {
  if (sentences.rows() == 0) {
    return absl::InvalidArgumentError("depth needs at least one sentence");
  }
  if (candidates.rows() == 0) {
    return absl::InvalidArgumentError("depth needs at least one candidate");
  }
  if (projections.size() == 0) {
    return absl::InvalidArgumentError("depth needs at least one projection");
  }
  if (candidates.cols() != sentences.cols() ||
      projections.dim() != sentences.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: candidates ", candidates.cols(), ", sentences ",
        sentences.cols(), ", projections ", projections.dim()));
  }
  return absl::OkStatus();
}

// p x k: row j holds every sentence projected on direction j, so counting
// runs over contiguous memory.
EmbeddingMatrix ProjectSentencesByDirection(ConstMatrixView sentences,
                                            const ProjectionSet& projections) {
  EmbeddingMatrix out(projections.size(), sentences.rows());
  for (size_t j = 0; j < projections.size(); ++j) {
    for (size_t l = 0; l < sentences.rows(); ++l) {
      out(j, l) = simd::Dot(sentences.row(l), projections.direction(j));
    }
  }
  return out;
}

int Aggregate(DepthAggregation rule, int current, int next) {
  return rule == DepthAggregation::kMin ? std::min(current, next)
                                        : std::max(current, next);
}

int InitialDepth(DepthAggregation rule) {
  return rule == DepthAggregation::kMin ? std::numeric_limits<int>::max()
                                        : std::numeric_limits<int>::min();
}

}  // namespace

absl::StatusOr<DepthAggregation> ParseDepthAggregation(std::string_view name) {
  if (name == "min") return DepthAggregation::kMin;
  if (name == "max") return DepthAggregation::kMax;
  return absl::InvalidArgumentError(
      absl::StrCat("depth aggregation must be min or max, got '", std::string(name), "'"));
}

std::string_view DepthAggregationName(DepthAggregation rule) {
  return rule == DepthAggregation::kMin ? "min" : "max";
}

absl::StatusOr<EmbeddingMatrix> ProjectAll(ConstMatrixView points,
                                           const ProjectionSet& projections) {
  if (points.cols() != projections.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: points ", points.cols(),
                     ", projections ", projections.dim()));
  }
  EmbeddingMatrix out(points.rows(), projections.size());
  for (size_t i = 0; i < points.rows(); ++i) {
    for (size_t j = 0; j < projections.size(); ++j) {
      out(i, j) = simd::Dot(points.row(i), projections.direction(j));
    }
  }
  return out;
}

absl::StatusOr<std::vector<DepthReport>> ApproxDepth(
    ConstMatrixView candidates, ConstMatrixView sentences,
    const ProjectionSet& projections, DepthAggregation rule) {
  if (auto s = CheckInputs(candidates, sentences, projections); !s.ok()) {
    return s;
  }
  const EmbeddingMatrix by_direction =
      ProjectSentencesByDirection(sentences, projections);
  const int k = static_cast<int>(sentences.rows());
  const size_t p = projections.size();

  std::vector<DepthReport> reports(candidates.rows());
  ParallelFor(candidates.rows(), [&](size_t i) {
    DepthReport& r = reports[i];
    r.candidate = i;
    r.per_projection_h.resize(p);
    r.per_projection_depth.resize(p);
    int depth = InitialDepth(rule);
    for (size_t j = 0; j < p; ++j) {
      const double c = simd::Dot(candidates.row(i), projections.direction(j));
      const int h =
          static_cast<int>(simd::CountGreaterEqual(by_direction.row(j), c));
      r.per_projection_h[j] = h;
      r.per_projection_depth[j] = std::min(h, k - h);
      depth = Aggregate(rule, depth, r.per_projection_depth[j]);
    }
    r.depth = depth;
  });
  return reports;
}

absl::StatusOr<std::vector<int>> ApproxDepthUtilities(
    ConstMatrixView candidates, ConstMatrixView sentences,
    const ProjectionSet& projections, DepthAggregation rule) {
  if (auto s = CheckInputs(candidates, sentences, projections); !s.ok()) {
    return s;
  }
  const EmbeddingMatrix by_direction =
      ProjectSentencesByDirection(sentences, projections);
  const int k = static_cast<int>(sentences.rows());
  const int ceiling = k / 2;
  const size_t p = projections.size();

  std::vector<int> depths(candidates.rows());
  ParallelFor(candidates.rows(), [&](size_t i) {
    int depth = InitialDepth(rule);
    for (size_t j = 0; j < p; ++j) {
      const double c = simd::Dot(candidates.row(i), projections.direction(j));
      const int h =
          static_cast<int>(simd::CountGreaterEqual(by_direction.row(j), c));
      depth = Aggregate(rule, depth, std::min(h, k - h));
      // Neither rule can move past its bound, so later projections are moot.
      if (rule == DepthAggregation::kMin && depth == 0) break;
      if (rule == DepthAggregation::kMax && depth == ceiling) break;
    }
    depths[i] = depth;
  });
  return depths;
}

absl::StatusOr<int> ExactDepth2d(std::span<const double> query,
                                 ConstMatrixView points) {
  if (query.size() != 2 || (points.rows() > 0 && points.cols() != 2)) {
    return absl::InvalidArgumentError(
        absl::StrCat("exact depth is planar only: query dim ", query.size(),
                     ", point dim ", points.cols()));
  }
  int coincident = 0;
  std::vector<std::array<double, 2>> offsets;
  offsets.reserve(points.rows());
  for (size_t i = 0; i < points.rows(); ++i) {
    const double dx = points(i, 0) - query[0];
    const double dy = points(i, 1) - query[1];
    if (dx == 0.0 && dy == 0.0) {
      ++coincident;
    } else {
      offsets.push_back({dx, dy});
    }
  }
  if (offsets.empty()) return coincident;

  // Direction w = s * perp(d_i) + t * delta * d_i with delta -> 0+, where
  // perp(d) = (-d_y, d_x). Then w . d_j has the sign of s * cross(d_i, d_j),
  // or of t * dot(d_i, d_j) when d_j is parallel to d_i.
  int best = std::numeric_limits<int>::max();
  for (const auto& di : offsets) {
    for (int s : {1, -1}) {
      for (int t : {1, -1}) {
        int count = 0;
        for (const auto& dj : offsets) {
          const double cross = di[0] * dj[1] - di[1] * dj[0];
          if (cross != 0.0) {
            count += s * cross > 0.0 ? 1 : 0;
          } else {
            const double dot = di[0] * dj[0] + di[1] * dj[1];
            count += t * dot > 0.0 ? 1 : 0;
          }
        }
        best = std::min(best, count);
      }
    }
  }
  return coincident + best;
}

absl::StatusOr<size_t> DeepestCandidate(std::span<const DepthReport> reports) {
  if (reports.empty()) {
    return absl::InvalidArgumentError("no depth reports");
  }
  size_t best = 0;
  for (size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].depth > reports[best].depth) best = i;
  }
  return best;
}

absl::StatusOr<size_t> DeepestCandidate(std::span<const int> depths) {
  if (depths.empty()) return absl::InvalidArgumentError("no depths");
  return static_cast<size_t>(std::max_element(depths.begin(), depths.end()) -
                             depths.begin());
}

}  // namespace deepcand
