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

#ifndef DEEPCAND_SAMPLING_H_
#define DEEPCAND_SAMPLING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/rng.h"

namespace deepcand {

// p unit vectors in R^dim, one per row.
class ProjectionSet {
 public:
  ProjectionSet() = default;
  // Rows are used as given; callers promise unit norm.
  explicit ProjectionSet(EmbeddingMatrix vectors)
      : vectors_(std::move(vectors)) {}

  size_t size() const { return vectors_.rows(); }
  size_t dim() const { return vectors_.cols(); }
  std::span<const double> direction(size_t j) const { return vectors_.row(j); }
  ConstMatrixView view() const { return vectors_.view(); }

  // The first `count` directions.
  ProjectionSet Prefix(size_t count) const;

 private:
  EmbeddingMatrix vectors_;
};

// Each row: a vector of independent standard normals, divided by its norm. A
// zero vector is redrawn.
absl::StatusOr<ProjectionSet> SampleUnitSphere(SeededRng& rng, size_t dim,
                                               size_t p);

// Inverse CDF of Laplace(0, scale) at u in (-1/2, 1/2):
// -scale * sign(u) * ln(1 - 2|u|).
double LaplaceFromUniform(double u, double scale);

// u = UniformOpen() - 1/2, then LaplaceFromUniform. The open interval keeps
// the result finite.
absl::StatusOr<double> SampleLaplace(SeededRng& rng, double scale);

// Index i with probability w_i / sum(w). Walks the binary64 cumulative sum.
absl::StatusOr<size_t> SampleCategorical(SeededRng& rng,
                                         std::span<const double> weights);

// log(sum(exp(v))) evaluated around the maximum. -inf entries contribute
// nothing.
double LogSumExp(std::span<const double> log_weights);

// exp(v_i - max) / sum_j exp(v_j - max). Entries may be -inf (zero weight);
// at least one must be finite and none may be NaN or +inf.
absl::StatusOr<std::vector<double>> LogSumExpNormalize(
    std::span<const double> log_weights);

// Marsaglia-Tsang for shape >= 1, with the u^(1/shape) boost below 1.
absl::StatusOr<double> SampleGamma(SeededRng& rng, double shape, double scale);

// `count` distinct indices from [0, n), ascending. Partial Fisher-Yates.
absl::StatusOr<std::vector<size_t>> SampleWithoutReplacement(SeededRng& rng,
                                                             size_t n,
                                                             size_t count);

}  // namespace deepcand

#endif  // DEEPCAND_SAMPLING_H_
